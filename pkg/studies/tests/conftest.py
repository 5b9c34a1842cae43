import pytest


@pytest.fixture
def mlr_scenario():
    from studies.scenarios import get_scenario
    return get_scenario('mlr-1')


@pytest.fixture
def clpo_scenario():
    from studies.scenarios import get_scenario
    return get_scenario('clpo', 1)


@pytest.fixture
def small_study(mlr_scenario):
    """A two-family small-sample study cheap enough for every test run."""
    from studies.validation import small_sample_study
    return small_sample_study(mlr_scenario, ['mlr', 'cl-po'], n_dev=200, reps=3,
                              n_eval=3000, seed=42, threads=2)
