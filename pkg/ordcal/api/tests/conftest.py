import numpy as np
import pytest


@pytest.fixture
def fitted_model():
    from ordcal.families import ModelSpec
    from ordcal.models import FittedModel
    return FittedModel(spec=ModelSpec.from_flag('cl-po'), Q=2, K=3, columns=('age', 'marker'),
                       alpha=np.array([0.8, -0.9]), B=np.array([[0.5], [-1.25]]),
                       loglik=-512.25, iterations=6, converged=True, tolerance=1e-8,
                       loglik_trace=(-540.0, -513.0, -512.25), gradient_norm=1e-9, n=500)


@pytest.fixture
def stereotype_model():
    from ordcal.families import ModelSpec
    from ordcal.models import FittedModel
    return FittedModel(spec=ModelSpec.from_flag('slm'), Q=1, K=3, columns=('x1',),
                       alpha=np.array([0.2, -0.4]), B=np.array([[0.7]]),
                       phi=np.array([1.0, 1.8]), loglik=-100.0, converged=True, n=120)
