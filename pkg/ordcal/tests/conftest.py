import numpy as np
import pandas as pd
import pytest


def simulate(n, alpha, B, seed, link=None):
    """Draw a Dataset whose outcome follows ``link`` with intercepts ``alpha``
    and coefficient matrix ``B`` (Q x (K-1)) on standard Normal predictors."""
    from ordcal.data import Dataset
    from ordcal.families import MultinomialLink
    alpha = np.asarray(alpha, dtype=float)
    B = np.asarray(B, dtype=float)
    K = alpha.size + 1
    link = link or MultinomialLink(K)
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, B.shape[0]))
    probs = link.probabilities(alpha[None, :] + X @ B)
    u = rng.random(n)
    y = 1 + (u[:, None] > np.cumsum(probs, axis=1)[:, :-1]).sum(axis=1)
    return Dataset(X, y, K), probs


@pytest.fixture
def three_category_data():
    data, _ = simulate(600, [-0.2, -0.8], [[0.8, 1.5], [0.4, 0.9]], seed=11)
    return data


@pytest.fixture
def four_category_data():
    from ordcal.families import CumulativeLink
    data, _ = simulate(800, [1.0, 0.0, -1.2], [[0.9, 0.9, 0.9], [-0.5, -0.5, -0.5]],
                       seed=23, link=CumulativeLink(4))
    return data


@pytest.fixture
def binary_data():
    data, _ = simulate(400, [0.3], [[1.1], [-0.6]], seed=5)
    return data


@pytest.fixture
def csv_dataset(tmp_path):
    """A three-category CSV with truth columns; returns (path, dataset, truth)."""
    data, truth = simulate(300, [-0.2, -0.8], [[0.8, 1.5], [0.4, 0.9]], seed=3)
    frame = pd.DataFrame(data.predictors, columns=['age', 'marker'])
    frame['y'] = data.outcomes
    for k in range(3):
        frame['truth_{}'.format(k + 1)] = truth[:, k]
    path = tmp_path / 'data.csv'
    frame.to_csv(path, index=False, float_format='%.17g')
    return str(path), data, truth


@pytest.fixture
def write_csv(tmp_path):
    def write(text, name='hand.csv'):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write


@pytest.fixture
def simulated():
    return simulate
