"""Data generation under the built-in scenarios.

Random numbers come from numpy's counter-based Philox bit generator;
Normal deviates are produced by the inverse Normal CDF (``scipy.special.ndtri``)
applied to uniforms on the open interval (0, 1) built from 53 random bits.
"""
import json
import logging
import os
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy import special

from ordcal.data import Dataset, ProbMatrix, load_dataset
from ordcal.errors import DatasetError
from ordcal.manifest import GENERATOR
from ordcal.utils import write_frame, write_text

from .scenarios import BINARY, CLPO_FORM, CONTINUOUS

logger = logging.getLogger(__name__)

MANTISSA = float(2 ** 53)


@dataclass(frozen=True, eq=False)
class SimulatedData:
    dataset: Dataset
    truth: ProbMatrix
    scenario: str
    seed: int
    generator: str = GENERATOR


def make_rng(seed):
    return np.random.Generator(np.random.Philox(int(seed)))


def replicate_seed(base, replicate):
    return int(base) ^ int(replicate)


def redraw_seed(seed, attempt):
    return int(seed) ^ (int(attempt) << 32)


def uniforms(rng, n):
    """Uniforms strictly inside (0, 1)."""
    return (rng.integers(0, 2 ** 53, size=n, dtype=np.int64) + 0.5) / MANTISSA


def normals(rng, n):
    return special.ndtri(uniforms(rng, n))


def draw_categories(rng, probabilities):
    """One label in 1..K per row of ``probabilities`` by inverse CDF."""
    probabilities = np.atleast_2d(probabilities)
    cumulative = np.cumsum(probabilities, axis=1)
    u = uniforms(rng, probabilities.shape[0])
    labels = 1 + (u[:, None] > cumulative[:, :-1]).sum(axis=1)
    return labels.astype(int)


def true_risks(scenario, X):
    return ProbMatrix(scenario.true_risks(X))


def clpo_predictors(scenario, rng, n):
    X = np.empty((n, scenario.Q))
    if scenario.mixture_priors is not None:
        weights = np.asarray(scenario.mixture_priors, dtype=float)
        component = draw_categories(rng, np.broadcast_to(weights, (n, weights.size)))
        for q, row in enumerate(scenario.mixture_means):
            X[:, q] = np.asarray(row, dtype=float)[component - 1] + normals(rng, n)
        return X
    for q, kind in enumerate(scenario.kinds):
        if kind == CONTINUOUS:
            X[:, q] = normals(rng, n)
        else:
            X[:, q] = (uniforms(rng, n) < 0.5).astype(float)
    return X


def generate(scenario, n, seed):
    """Simulate ``n`` cases; deterministic given (scenario, n, seed)."""
    if n < 1:
        raise DatasetError('need at least one case to simulate')
    rng = make_rng(seed)
    if scenario.form == CLPO_FORM:
        X = clpo_predictors(scenario, rng, n)
        risks = scenario.true_risks(X)
        y = draw_categories(rng, risks)
    else:
        priors = np.asarray(scenario.priors, dtype=float)
        y = draw_categories(rng, np.broadcast_to(priors, (n, scenario.K)))
        X = np.empty((n, scenario.Q))
        for q, (kind, row) in enumerate(zip(scenario.kinds, scenario.means)):
            level = np.asarray(row, dtype=float)[y - 1]
            if kind == BINARY:
                X[:, q] = (uniforms(rng, n) < level).astype(float)
            else:
                X[:, q] = level + normals(rng, n)
        risks = scenario.true_risks(X)

    dataset = Dataset(X, y, scenario.K, scenario.columns)
    logger.debug('Simulated data. scenario="%s" n="%s" seed="%s" counts="%s"',
                 scenario.id, n, seed, dataset.counts().tolist())
    return SimulatedData(dataset=dataset, truth=ProbMatrix(risks),
                         scenario=scenario.id, seed=int(seed))


def generate_complete(scenario, n, seed, max_attempts):
    """``generate`` redrawn until every category is present.

    Returns ``(simulated, redraws)``; ``simulated`` is None when every
    attempt missed a category.
    """
    for attempt in range(max_attempts):
        simulated = generate(scenario, n, redraw_seed(seed, attempt))
        if not simulated.dataset.missing_categories():
            return simulated, attempt
    logger.warning('No complete draw. scenario="%s" n="%s" seed="%s" attempts="%s"',
                   scenario.id, n, seed, max_attempts)
    return None, max_attempts


def simulated_frame(simulated):
    data = simulated.dataset
    frame = pd.DataFrame(data.predictors, columns=list(data.columns))
    frame['y'] = data.outcomes
    for k in range(1, data.K + 1):
        frame['truth_{}'.format(k)] = simulated.truth.category(k)
    return frame


def export_simulated(simulated, path):
    """CSV (predictors, ``y``, ``truth_1..truth_K``) plus a ``.json`` sidecar."""
    from .api.serializers import SimulatedDatasetSerializer
    from ordcal.api.serializers import render_json
    write_frame(path, simulated_frame(simulated))
    sidecar = os.path.splitext(path)[0] + '.json'
    document = SimulatedDatasetSerializer(simulated).data
    write_text(sidecar, render_json(document))
    logger.info('Exported simulated data. path="%s" scenario="%s" n="%s"',
                path, simulated.scenario, simulated.dataset.n)
    return path, sidecar


def load_simulated(path):
    """Read an exported CSV (and its sidecar, when present) back."""
    scenario = seed = categories = None
    sidecar = os.path.splitext(path)[0] + '.json'
    if os.path.isfile(sidecar):
        with open(sidecar, encoding='utf-8') as handle:
            document = json.load(handle)
        scenario = document.get('scenario')
        seed = document.get('seed')
        categories = document.get('K')
    dataset, truth = load_dataset(path, categories=categories)
    if truth is None:
        raise DatasetError('no truth_<k> columns in "{}"'.format(path))
    return SimulatedData(dataset=dataset, truth=truth, scenario=scenario, seed=seed)
