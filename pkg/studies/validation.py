"""Evaluation designs: large-sample apparent performance, small-sample
develop/validate replications and the optimism-corrected bootstrap.

Every measure is keyed by its column name in the performance table:
``category_<k>_intercept`` / ``category_<k>_slope``, ``dichotomy_<k>_...``
(k = 2..K, meaning Y >= k), ``lp_<j>_...``, then ``eci``, ``rmspe`` and
``orc``.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ordcal.calibration import (CATEGORY, DICHOTOMY, eci, flexible_recalibration,
                                model_specific_calibration, weak_calibrations)
from ordcal.conf import settings
from ordcal.errors import (ConvergenceError, DatasetError, DegenerateBasisError,
                           NumericalError)
from ordcal.families import ModelSpec, param_count
from ordcal.fitting import FitOptions, fit
from ordcal.metrics import orc, rmspe

from .simulation import generate, generate_complete, make_rng, redraw_seed, replicate_seed

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = ('eci', 'rmspe', 'orc')


def calibration_columns(K):
    names = ['category_{}'.format(k) for k in range(1, K + 1)]
    names += ['dichotomy_{}'.format(k) for k in range(2, K + 1)]
    names += ['lp_{}'.format(j) for j in range(1, K)]
    columns = []
    for name in names:
        columns += [name + '_intercept', name + '_slope']
    return columns


def table_columns(K):
    return calibration_columns(K) + list(SUMMARY_COLUMNS)


def _prefix(result):
    return '{}_{}'.format(result.target.kind, result.target.index)


@dataclass
class PerformanceRow:
    scenario: str
    family: str
    n_dev: int
    n_eval: int
    K: int
    measures: dict = field(default_factory=dict)
    replicates: int = 1
    failures: int = 0
    redraws: int = 0
    excluded: dict = field(default_factory=dict)
    messages: list = field(default_factory=list)


@dataclass
class ReplicateRecord:
    replicate: int
    seed: int
    redraws: int = 0
    measures: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)


@dataclass
class StudyResult:
    kind: str
    seed: int
    rows: list
    parameters: dict = field(default_factory=dict)
    replicates: dict = field(default_factory=dict)


def evaluate(model, data, truth=None, with_eci=True):
    """Every performance-table measure of ``model`` on ``data``.

    Calibration targets that cannot be estimated (degenerate or
    non-convergent) are NaN; so are ECI without ``with_eci`` and rMSPE
    without ``truth``.
    """
    probs = model.predict(data.predictors)
    y = data.outcomes
    measures = {}
    results = (weak_calibrations(probs, y, CATEGORY) +
               weak_calibrations(probs, y, DICHOTOMY) +
               model_specific_calibration(model, data))
    for result in results:
        measures[_prefix(result) + '_intercept'] = result.intercept
        measures[_prefix(result) + '_slope'] = result.slope

    measures['eci'] = float('nan')
    if with_eci:
        try:
            recal = flexible_recalibration(probs, y)
            measures['eci'] = eci(probs, recal, y)
        except (NumericalError, DegenerateBasisError) as exc:
            logger.warning('ECI unavailable. family="%s" error="%s"', model.spec.flag, exc)
    measures['rmspe'] = rmspe(probs, truth) if truth is not None else float('nan')
    measures['orc'] = orc(probs, y)
    return measures


def _fit_or_fail(data, spec, options):
    """(model, None) on success, (None, message) on failure."""
    try:
        model = fit(data, spec, options)
    except (NumericalError, DatasetError) as exc:
        return None, str(exc)
    if not model.converged:
        return None, 'did not converge: {}'.format('; '.join(model.warnings))
    return model, None


def _specs(families):
    return [family if isinstance(family, ModelSpec) else ModelSpec.from_flag(family)
            for family in families]


def _pool(threads):
    return ThreadPoolExecutor(max_workers=max(1, int(threads or 1)))


def large_sample_study(scenarios, families, n=None, seed=None, threads=1, options=None):
    """Fit every family on one large dataset per scenario and report its
    apparent performance on the same data."""
    n = settings.ORDCAL_LARGE_SAMPLE_SIZE if n is None else int(n)
    seed = settings.ORDCAL_SEED if seed is None else int(seed)
    options = options or FitOptions()
    specs = _specs(families)

    def run(job):
        scenario, simulated, spec = job
        row = PerformanceRow(scenario.id, spec.flag, n, n, scenario.K)
        model, failure = _fit_or_fail(simulated.dataset, spec, options)
        if model is None:
            logger.warning('Fit failed. scenario="%s" family="%s" error="%s"',
                           scenario.id, spec.flag, failure)
            row.failures = 1
            row.messages.append(failure)
            row.measures = {column: float('nan') for column in table_columns(scenario.K)}
            return row
        row.measures = evaluate(model, simulated.dataset, simulated.truth)
        return row

    jobs = []
    for scenario in scenarios:
        simulated = generate(scenario, n, seed)
        logger.info('Large-sample data. scenario="%s" n="%s" seed="%s"', scenario.id, n, seed)
        jobs += [(scenario, simulated, spec) for spec in specs]
    with _pool(threads) as pool:
        rows = list(pool.map(run, jobs))
    return StudyResult('large-sample', seed, rows,
                       parameters={'n': n, 'families': [s.flag for s in specs],
                                   'scenarios': [s.id for s in scenarios]})


def aggregate(records, scenario, spec, n_dev, n_eval, bound=None):
    """Mean of every measure over the replicates where ``spec`` was fit.

    Slopes with |b| > ``bound`` are left out of their mean and counted.
    """
    bound = settings.ORDCAL_SLOPE_EXCLUSION_BOUND if bound is None else bound
    row = PerformanceRow(scenario.id, spec.flag, n_dev, n_eval, scenario.K,
                         replicates=len(records))
    row.redraws = sum(record.redraws for record in records)
    successes = []
    for record in records:
        if spec.flag in record.measures:
            successes.append(record.measures[spec.flag])
        else:
            row.failures += 1
            row.messages.append('replicate {}: {}'.format(
                record.replicate, record.failures.get(spec.flag, 'not fitted')))
    for column in table_columns(scenario.K):
        values = np.array([m.get(column, np.nan) for m in successes], dtype=float)
        if column.endswith('_slope'):
            outside = np.abs(values) > bound
            if np.any(outside):
                row.excluded[column] = int(outside.sum())
                values = values[~outside]
        finite = values[np.isfinite(values)]
        row.measures[column] = float(finite.mean()) if finite.size else float('nan')
    return row


def small_sample_study(scenario, families, n_dev, reps=None, n_eval=None, seed=None,
                       threads=1, options=None):
    """Develop on ``reps`` small datasets, validate each fit on one shared
    large evaluation set drawn with the base seed."""
    reps = settings.ORDCAL_REPLICATES if reps is None else int(reps)
    n_eval = settings.ORDCAL_LARGE_SAMPLE_SIZE if n_eval is None else int(n_eval)
    seed = settings.ORDCAL_SEED if seed is None else int(seed)
    options = options or FitOptions()
    specs = _specs(families)
    attempts = settings.ORDCAL_REDRAW_FACTOR

    for spec in specs:
        needed = param_count(spec, scenario.Q, scenario.K) + 10
        if n_dev < needed:
            logger.warning('Development sample below parameters + 10. scenario="%s" '
                           'family="%s" n_dev="%s" recommended="%s"',
                           scenario.id, spec.flag, n_dev, needed)

    evaluation = generate(scenario, n_eval, seed)

    def run(replicate):
        rep_seed = replicate_seed(seed, replicate)
        record = ReplicateRecord(replicate, rep_seed)
        simulated, record.redraws = generate_complete(scenario, n_dev, rep_seed, attempts)
        if simulated is None:
            message = 'no draw with every category in {} attempts'.format(attempts)
            for spec in specs:
                record.failures[spec.flag] = message
            return record
        for spec in specs:
            model, failure = _fit_or_fail(simulated.dataset, spec, options)
            if model is None:
                record.failures[spec.flag] = failure
                continue
            record.measures[spec.flag] = evaluate(model, evaluation.dataset,
                                                  evaluation.truth, with_eci=False)
        return record

    with _pool(threads) as pool:
        records = list(pool.map(run, range(reps)))
    rows = [aggregate(records, scenario, spec, n_dev, n_eval) for spec in specs]
    for row in rows:
        logger.info('Small-sample study row. scenario="%s" family="%s" n_dev="%s" '
                    'replicates="%s" failures="%s" redraws="%s"', row.scenario, row.family,
                    n_dev, row.replicates, row.failures, row.redraws)
    return StudyResult('small-sample', seed, rows,
                       parameters={'n_dev': n_dev, 'n_eval': n_eval, 'reps': reps,
                                   'families': [s.flag for s in specs],
                                   'scenarios': [scenario.id]},
                       replicates={scenario.id: records})


@dataclass
class BootstrapResult:
    family: str
    samples: int
    seed: int
    apparent: dict
    optimism: dict
    corrected: dict
    successes: int = 0
    failures: int = 0
    redraws: int = 0
    messages: list = field(default_factory=list)


def _bootstrap_measures(model, data):
    measures = evaluate(model, data, with_eci=False)
    measures.pop('eci')
    measures.pop('rmspe')
    return measures


def _resample(data, sample_seed, attempt):
    rng = make_rng(redraw_seed(sample_seed, attempt))
    return data.take(rng.integers(0, data.n, size=data.n))


def _bootstrap_draws(data, seed, B, budget):
    """``(redraws, attempt)`` per resample, drawn in order from one shared
    budget; ``attempt`` is None for resamples the budget did not reach."""
    draws, used = [], 0
    for b in range(B):
        sample_seed = replicate_seed(seed, b)
        attempt, accepted = 0, None
        while used < budget:
            used += 1
            if not _resample(data, sample_seed, attempt).missing_categories():
                accepted = attempt
                break
            attempt += 1
        draws.append((attempt, accepted))
    if draws and draws[-1][1] is None:
        logger.warning('Bootstrap redraw budget spent. B="%s" budget="%s"', B, budget)
    return draws


def bootstrap_correct(data, spec, B=None, seed=None, threads=1, options=None):
    """Optimism-corrected calibration intercepts/slopes and ORC.

    For each resample: fit on the resample, measure on the resample
    (boot-apparent) and on the original data (boot-test). The optimism is
    the mean difference; corrected = apparent - optimism. Resamples missing
    a category are redrawn; all resamples share one budget of
    ``ORDCAL_REDRAW_FACTOR`` x B draws, and a resample left without a draw
    once it is spent counts as a failure.
    """
    B = settings.ORDCAL_BOOTSTRAP_SAMPLES if B is None else int(B)
    seed = settings.ORDCAL_SEED if seed is None else int(seed)
    options = options or FitOptions()
    if isinstance(spec, str):
        spec = ModelSpec.from_flag(spec)
    model = fit(data, spec, options)
    if not model.converged:
        raise ConvergenceError('the apparent {} model'.format(spec.flag),
                               '; '.join(model.warnings))
    apparent = _bootstrap_measures(model, data)
    budget = settings.ORDCAL_REDRAW_FACTOR * B
    draws = _bootstrap_draws(data, seed, B, budget)

    def run(b):
        redraws, attempt = draws[b]
        if attempt is None:
            return redraws, None, 'redraw budget of {} draws spent'.format(budget)
        resample = _resample(data, replicate_seed(seed, b), attempt)
        boot_model, failure = _fit_or_fail(resample, spec, options)
        if boot_model is None:
            return redraws, None, failure
        boot_apparent = _bootstrap_measures(boot_model, resample)
        boot_test = _bootstrap_measures(boot_model, data)
        return redraws, {k: boot_apparent[k] - boot_test[k] for k in apparent}, None

    with _pool(threads) as pool:
        outcomes = list(pool.map(run, range(B)))

    result = BootstrapResult(spec.flag, B, seed, apparent, {}, {})
    differences = []
    for b, (redraws, difference, failure) in enumerate(outcomes):
        result.redraws += redraws
        if difference is None:
            result.failures += 1
            result.messages.append('resample {}: {}'.format(b, failure))
        else:
            differences.append(difference)
    result.successes = len(differences)
    for key, value in apparent.items():
        values = np.array([d[key] for d in differences], dtype=float)
        finite = values[np.isfinite(values)]
        optimism = float(finite.mean()) if finite.size else 0.0
        result.optimism[key] = optimism
        result.corrected[key] = value - optimism
    logger.info('Bootstrap done. family="%s" B="%s" successes="%s" failures="%s" '
                'redraws="%s"', spec.flag, B, result.successes, result.failures,
                result.redraws)
    return result
