"""Calibration assessment for ordinal risk models.

Three layers are offered:

* weak calibration per outcome category (Y = k) or per dichotomy (Y >= k):
  a binary logistic recalibration on the logit of the estimated risk;
* model-specific calibration: the fitted model's own family refit on its
  linear predictors, which returns intercepts 0 and slopes 1 on the
  development data by construction;
* flexible recalibration: a vector spline recalibration model giving
  per-case observed proportions, summarized by the estimated calibration
  index (ECI) and drawn as calibration scatter plots and curves.
"""
import logging
import os
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .conf import settings
from .data import ProbMatrix
from .errors import (ConvergenceError, DatasetError, DegenerateBasisError,
                     DegenerateTargetError, NoPredictiveVariationError,
                     NumericalError)
from .families import (ContinuationLink, DiagonalStructure, FreeStructure,
                       MultinomialLink, ProportionalStructure)
from .fitting import FitOptions, fit_design
from .smoothing import independent_columns, smooth_curve, spline_basis
from .utils import clipped_log, clipped_logit, write_frame

logger = logging.getLogger(__name__)

CATEGORY = 'category'
DICHOTOMY = 'dichotomy'
LINEAR_PREDICTOR = 'lp'

SETUPS = {
    'mlr-reference': (MultinomialLink, 'reference'),
    'cr-reference': (ContinuationLink, 'reference'),
    'mlr-dichotomy': (MultinomialLink, 'dichotomy'),
    'cr-dichotomy': (ContinuationLink, 'dichotomy'),
    'mlr-category': (MultinomialLink, 'category'),
    'cr-category': (ContinuationLink, 'category'),
}
DEFAULT_SETUP = 'mlr-reference'


@dataclass(frozen=True)
class CalibrationTarget:
    kind: str
    index: int

    @property
    def label(self):
        if self.kind == CATEGORY:
            return 'Y={}'.format(self.index)
        if self.kind == DICHOTOMY:
            return 'Y>={}'.format(self.index)
        return 'LP{}'.format(self.index)

    @property
    def slug(self):
        return '{}_{}'.format(self.kind, self.index)

    def __str__(self):
        return self.label


def category(k):
    return CalibrationTarget(CATEGORY, int(k))


def dichotomy(k):
    return CalibrationTarget(DICHOTOMY, int(k))


@dataclass(frozen=True)
class WeakCalibration:
    target: CalibrationTarget
    intercept: float
    slope: float
    converged: bool = True
    message: str = ''

    @classmethod
    def failed(cls, target, message):
        return cls(target, float('nan'), float('nan'), False, message)


def _indicator(y, target):
    y = np.asarray(y, dtype=int)
    if target.kind == CATEGORY:
        return (y == target.index).astype(int)
    if target.kind == DICHOTOMY:
        return (y >= target.index).astype(int)
    raise ValueError('weak calibration targets a category or a dichotomy, not {}'.format(
        target.kind))


def _target_risk(probs, target):
    if not 1 <= target.index <= probs.K:
        raise DatasetError('calibration target {} outside 1..{}'.format(target, probs.K))
    if target.kind == CATEGORY:
        return probs.category(target.index)
    return probs.at_least(target.index)


def logistic_recalibration(events, predictor, label='target'):
    """Binary recalibration of ``events`` on ``predictor``.

    The slope comes from the two-parameter fit; the intercept from a
    one-parameter fit with ``predictor`` as a fixed offset (slope 1).
    """
    events = np.asarray(events, dtype=int)
    predictor = np.asarray(predictor, dtype=float)
    options = FitOptions()
    link = MultinomialLink(2)
    slope_fit = fit_design(link, FreeStructure(1, 2), predictor[:, None], events,
                           options, name='{} slope'.format(label))
    intercept_fit = fit_design(link, FreeStructure(0, 2), np.empty((events.size, 0)),
                               events, options, offset=predictor[:, None],
                               start=np.zeros(1), name='{} intercept'.format(label))
    converged = slope_fit.converged and intercept_fit.converged
    warnings = slope_fit.warnings + intercept_fit.warnings
    return (float(intercept_fit.theta[0]), float(slope_fit.theta[1]), converged,
            '; '.join(warnings))


def weak_calibration(probs, y, target):
    """Calibration intercept and slope for one category or dichotomy."""
    y = np.asarray(y, dtype=int)
    if probs.n != y.size:
        raise DatasetError('probabilities and outcomes differ in length')
    events = _indicator(y, target)
    if events.min() == events.max():
        raise DegenerateTargetError(target.label)
    predictor = clipped_logit(_target_risk(probs, target))
    intercept, slope, converged, message = logistic_recalibration(events, predictor,
                                                                  target.label)
    if not np.isfinite(slope):
        raise ConvergenceError('calibration slope for {}'.format(target.label))
    return WeakCalibration(target, intercept, slope, converged, message)


def weak_calibrations(probs, y, kind=CATEGORY):
    """Every category (1..K) or every dichotomy (>=2..>=K); degenerate or
    failing targets are returned flagged rather than raised."""
    indices = range(1, probs.K + 1) if kind == CATEGORY else range(2, probs.K + 1)
    results = []
    for k in indices:
        target = CalibrationTarget(kind, k)
        try:
            results.append(weak_calibration(probs, y, target))
        except (DegenerateTargetError, NumericalError) as exc:
            logger.warning('Weak calibration failed. target="%s" error="%s"', target, exc)
            results.append(WeakCalibration.failed(target, str(exc)))
    return results


def model_specific_calibration(model, data):
    """One intercept/slope pair per linear predictor of ``model``.

    Proportional odds families are refit per linear predictor with that
    predictor as their single covariate; every other family is refit with
    equation k depending only on linear predictor k.
    """
    lp = model.linear_predictors(data.predictors)
    y = model.encode(data.outcomes)
    link = model.link
    m = model.K - 1
    options = FitOptions()
    n = lp.shape[0]
    no_covariates = np.empty((n, 0))
    results = []

    if model.spec.uses_model_family_per_lp:
        alpha = np.asarray(model.alpha, dtype=float)
        for j in range(m):
            target = CalibrationTarget(LINEAR_PREDICTOR, j + 1)
            start = np.concatenate([alpha - alpha[j], [1.0]])
            offset = np.repeat(lp[:, [j]], m, axis=1)
            try:
                slope_fit = fit_design(link, ProportionalStructure(1, model.K),
                                       lp[:, [j]], y, options, start=start,
                                       name='{} slope'.format(target))
                intercept_fit = fit_design(link, FreeStructure(0, model.K), no_covariates,
                                           y, options, offset=offset, start=start[:m],
                                           name='{} intercept'.format(target))
            except NumericalError as exc:
                results.append(WeakCalibration.failed(target, str(exc)))
                continue
            converged = slope_fit.converged and intercept_fit.converged
            message = '; '.join(slope_fit.warnings + intercept_fit.warnings)
            results.append(WeakCalibration(target, float(intercept_fit.theta[j]),
                                           float(slope_fit.theta[m]), converged, message))
    else:
        try:
            slope_fit = fit_design(link, DiagonalStructure(model.K), lp, y, options,
                                   start=np.concatenate([np.zeros(m), np.ones(m)]),
                                   name='{} diagonal slopes'.format(model.spec.flag))
            intercept_fit = fit_design(link, FreeStructure(0, model.K), no_covariates, y,
                                       options, offset=lp, start=np.zeros(m),
                                       name='{} intercepts'.format(model.spec.flag))
        except NumericalError as exc:
            return [WeakCalibration.failed(CalibrationTarget(LINEAR_PREDICTOR, j + 1),
                                           str(exc)) for j in range(m)]
        converged = slope_fit.converged and intercept_fit.converged
        message = '; '.join(slope_fit.warnings + intercept_fit.warnings)
        for j in range(m):
            results.append(WeakCalibration(CalibrationTarget(LINEAR_PREDICTOR, j + 1),
                                           float(intercept_fit.theta[j]),
                                           float(slope_fit.theta[m + j]),
                                           converged, message))
    for result in results:
        if not result.converged:
            logger.warning('Model-specific calibration flagged. family="%s" target="%s" '
                           'message="%s"', model.spec.flag, result.target, result.message)
    return results


@dataclass(frozen=True, eq=False)
class FlexibleRecalibration:
    setup: str
    df: tuple
    coefficients: np.ndarray
    observed: np.ndarray
    loglik: float = float('nan')
    warnings: tuple = field(default_factory=tuple)
    aliased: tuple = field(default_factory=tuple)
    iterations: int = 0

    @property
    def probs(self):
        return ProbMatrix(self.observed)


def transformed_predictors(probs, kind):
    """The K-1 recalibration covariates for a setup kind."""
    P = probs.values
    if kind == 'reference':
        return clipped_log(P[:, 1:]) - clipped_log(P[:, [0]])
    if kind == 'dichotomy':
        return clipped_logit(probs.exceedance()[:, 1:])
    if kind == 'category':
        return clipped_logit(P[:, :-1])
    raise ValueError('unknown recalibration kind "{}"'.format(kind))


def flexible_recalibration(probs, y, setup=DEFAULT_SETUP, df=None):
    """Spline recalibration model giving observed proportions per case."""
    if setup not in SETUPS:
        raise ValueError('unknown recalibration setup "{}", choose from {}'.format(
            setup, ', '.join(SETUPS)))
    df = settings.ORDCAL_SPLINE_DF if df is None else int(df)
    y = np.asarray(y, dtype=int)
    if probs.n != y.size:
        raise DatasetError('probabilities and outcomes differ in length')
    link_class, kind = SETUPS[setup]
    K = probs.K
    warnings = []
    if probs.n < 10 * K * df:
        message = 'only {} cases for a recalibration model wanting {} (10 x K x df)'.format(
            probs.n, 10 * K * df)
        warnings.append(message)
        logger.warning('Small recalibration sample. setup="%s" n="%s" K="%s" df="%s"',
                       setup, probs.n, K, df)

    Z = transformed_predictors(probs, kind)
    columns, used = [], []
    for j in range(Z.shape[1]):
        basis, notes = spline_basis(Z[:, j], df, name='{} predictor {}'.format(kind, j + 1))
        columns.append(basis.transform(Z[:, j]))
        used.append(basis.df)
        warnings.extend(notes)
    design = np.hstack(columns)
    # the K-1 covariates of rank-1 models are affine in one another
    kept = independent_columns(design)
    aliased = tuple(int(j) for j in np.setdiff1d(np.arange(design.shape[1]), kept))
    if aliased:
        warnings.append('dropped {} aliased recalibration columns'.format(len(aliased)))
        logger.info('Aliased recalibration columns dropped. setup="%s" dropped="%s"',
                    setup, len(aliased))
        design = design[:, kept]

    link = link_class(K)
    structure = FreeStructure(design.shape[1], K)
    solution = fit_design(link, structure, design, y - 1, FitOptions(),
                          name='flexible {}'.format(setup))
    if not solution.converged:
        raise ConvergenceError('flexible recalibration ({})'.format(setup),
                               '; '.join(solution.warnings))
    C = structure.coefficients(solution.theta)
    observed = link.probabilities(C[0][None, :] + design @ C[1:])
    logger.info('Flexible recalibration. setup="%s" n="%s" df="%s"', setup, probs.n, used)
    return FlexibleRecalibration(setup=setup, df=tuple(used), coefficients=solution.theta,
                                 observed=observed, loglik=solution.loglik,
                                 warnings=tuple(warnings), aliased=aliased,
                                 iterations=solution.iterations)


ORIGINAL = 'original'
RESCALED = 'rescaled'


def eci(probs, recal, y, variant=RESCALED):
    """Estimated calibration index: 0 means perfect agreement between the
    estimated risks and the observed proportions."""
    P = probs.values
    O = np.asarray(recal.observed, dtype=float)
    if P.shape != O.shape:
        raise DatasetError('probabilities and observed proportions differ in shape')
    n, K = P.shape
    squared = float(np.sum((P - O) ** 2))
    if variant == ORIGINAL:
        return squared / (n * K) * 100.0 * K / 2.0
    if variant != RESCALED:
        raise ValueError('unknown ECI variant "{}"'.format(variant))
    y = np.asarray(y, dtype=int)
    rates = np.bincount(y - 1, minlength=K)[:K] / float(y.size)
    denominator = float(np.sum((P - rates[None, :]) ** 2))
    if denominator < settings.ORDCAL_ECI_MIN_DENOMINATOR:
        raise NoPredictiveVariationError()
    return squared / denominator


@dataclass(frozen=True, eq=False)
class CalibrationCurve:
    target: CalibrationTarget
    estimated: np.ndarray
    observed: np.ndarray
    grid: np.ndarray
    smoothed: np.ndarray


def calibration_curve_data(probs, recal, mode=CATEGORY):
    """Scatter pairs (estimated, observed) and a display curve per target."""
    P = probs.values
    O = np.asarray(recal.observed, dtype=float)
    if P.shape != O.shape:
        raise DatasetError('probabilities and observed proportions differ in shape')
    if mode == CATEGORY:
        targets = [category(k) for k in range(1, probs.K + 1)]
    elif mode == DICHOTOMY:
        P = probs.exceedance()
        O = recal.probs.exceedance()
        targets = [dichotomy(k) for k in range(2, probs.K + 1)]
    else:
        raise ValueError('unknown curve mode "{}"'.format(mode))
    curves = []
    for target in targets:
        estimated = P[:, target.index - 1]
        observed = O[:, target.index - 1]
        grid, smoothed = smooth_curve(estimated, observed)
        curves.append(CalibrationCurve(target, estimated, observed, grid, smoothed))
    return curves


def write_plot_data(curves, directory, mode):
    """One scatter and one curve TSV per target plus a manifest JSON."""
    from .api.serializers import PlotManifestSerializer, render_json
    from .utils import write_text
    entries = []
    for curve in curves:
        scatter_name = 'scatter_{}.tsv'.format(curve.target.slug)
        curve_name = 'curve_{}.tsv'.format(curve.target.slug)
        write_frame(os.path.join(directory, scatter_name),
                    pd.DataFrame({'estimated': curve.estimated, 'observed': curve.observed}),
                    sep='\t')
        write_frame(os.path.join(directory, curve_name),
                    pd.DataFrame({'estimated': curve.grid, 'observed': curve.smoothed}),
                    sep='\t')
        entries.append({'target': curve.target.label, 'scatter': scatter_name,
                        'curve': curve_name, 'points': int(curve.estimated.size)})
    manifest = PlotManifestSerializer({'mode': mode, 'targets': entries}).data
    path = os.path.join(directory, 'plots_{}.json'.format(mode))
    write_text(path, render_json(manifest))
    return path


@dataclass(frozen=True, eq=False)
class CalibrationReport:
    family: str
    n: int
    K: int
    categories: tuple
    dichotomies: tuple
    model_specific: tuple
    setup: str
    df: tuple
    eci_original: float
    eci_rescaled: float
    orc: float
    rmspe: float = None
    invalid_rows: int = 0
    warnings: tuple = ()
    recalibration: FlexibleRecalibration = None


def calibration_report(model, data, truth=None, setup=DEFAULT_SETUP, df=None):
    """Every calibration and discrimination summary of ``model`` on ``data``."""
    from .metrics import orc, rmspe
    probs = model.predict(data.predictors)
    y = data.outcomes
    warnings = list(model.warnings)
    invalid = int(np.sum(~probs.valid))
    if invalid:
        warnings.append('{} rows with negative estimated risks'.format(invalid))

    recal = None
    eci_original = eci_rescaled = float('nan')
    try:
        recal = flexible_recalibration(probs, y, setup, df)
        warnings.extend(recal.warnings)
        eci_original = eci(probs, recal, y, ORIGINAL)
        eci_rescaled = eci(probs, recal, y, RESCALED)
    except (NumericalError, DegenerateBasisError) as exc:
        logger.warning('Flexible recalibration failed. family="%s" error="%s"',
                       model.spec.flag, exc)
        warnings.append(str(exc))

    error = None
    if truth is not None:
        error = rmspe(probs, truth)
    return CalibrationReport(
        family=model.spec.flag, n=data.n, K=data.K,
        categories=tuple(weak_calibrations(probs, y, CATEGORY)),
        dichotomies=tuple(weak_calibrations(probs, y, DICHOTOMY)),
        model_specific=tuple(model_specific_calibration(model, data)),
        setup=setup, df=recal.df if recal is not None else (),
        eci_original=eci_original, eci_rescaled=eci_rescaled,
        orc=orc(probs, y), rmspe=error, invalid_rows=invalid,
        warnings=tuple(warnings), recalibration=recal)
