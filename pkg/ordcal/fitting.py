"""Maximum-likelihood fitting of the ordinal families.

Every likelihood is maximized by Newton steps on the observed information,
falling back to Fisher scoring (expected information) when the observed
information is not positive definite, and to a plain gradient step when
neither system can be solved. Each step is halved until the log-likelihood
increases, so the log-likelihood trace is monotone. The stereotype model
alternates between its linear block (alpha, beta) and the scaling factors
before a joint polish.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg, stats

from .conf import settings
from .data import Dataset
from .errors import (ConvergenceError, DatasetError, LRTestError,
                     NonFiniteError, NumericalError, SpecificationError)
from .families import (ADJACENT, CUMULATIVE, MULTINOMIAL, STEREOTYPE,
                       ModelSpec, link_for, param_count, structure_for)
from .models import FittedModel, Solution, category_order

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FitOptions:
    tolerance: float = None
    max_iter: int = None
    max_alternations: int = None
    step_halvings: int = None
    reference: int = 1

    def __post_init__(self):
        defaults = {
            'tolerance': settings.ORDCAL_TOLERANCE,
            'max_iter': settings.ORDCAL_MAX_ITER,
            'max_alternations': settings.ORDCAL_MAX_ALTERNATIONS,
            'step_halvings': settings.ORDCAL_STEP_HALVINGS,
        }
        for name, value in defaults.items():
            if getattr(self, name) is None:
                object.__setattr__(self, name, value)


class Objective(object):
    """Log-likelihood of one model on one design."""

    def __init__(self, link, structure, X, y, offset=None):
        X = np.asarray(X, dtype=float)
        self.n = X.shape[0]
        self.X1 = np.column_stack([np.ones(self.n), X]) if X.size else np.ones((self.n, 1))
        self.y = np.asarray(y, dtype=int)
        self.link = link
        self.structure = structure
        self.offset = None if offset is None else np.asarray(offset, dtype=float)

    def eta(self, theta):
        eta = self.X1 @ self.structure.coefficients(theta)
        if self.offset is not None:
            eta = eta + self.offset
        return eta

    def _evaluate(self, theta):
        eta = self.eta(theta)
        if not np.all(np.isfinite(eta)):
            raise NonFiniteError('linear predictor', int(np.argwhere(~np.isfinite(eta))[0][0]))
        rows, score, info = self.link.evaluate(eta, self.y)
        bad = np.flatnonzero(~np.isfinite(rows))
        if bad.size:
            raise NonFiniteError('log-likelihood contribution of row', int(bad[0]))
        return eta, float(rows.sum()), score, info

    def loglik(self, theta):
        return self._evaluate(theta)[1]

    def gradient(self, theta):
        eta, ll, score, _ = self._evaluate(theta)
        grad_C = self.X1.T @ score
        T = self.structure.derivative(theta)
        return ll, T.T @ grad_C.flatten(order='F')

    def derivatives(self, theta, expected=False):
        """Log-likelihood, gradient and information matrix at ``theta``."""
        eta, ll, score, info = self._evaluate(theta)
        if expected:
            info = self.link.expected_information(eta)
        grad_C = self.X1.T @ score
        T = self.structure.derivative(theta)
        grad = T.T @ grad_C.flatten(order='F')
        size = self.X1.shape[1] * eta.shape[1]
        M = np.einsum('ia,ikl,ib->kalb', self.X1, info, self.X1,
                      optimize=True).reshape(size, size)
        H = T.T @ M @ T
        if not expected:
            correction = self.structure.curvature(theta, grad_C)
            if correction is not None:
                H = H - correction
        return ll, grad, H, eta


class NewtonSolver(object):

    def __init__(self, objective, options, name='model'):
        self.objective = objective
        self.options = options
        self.name = name

    def direction(self, theta, index):
        ll, grad, H, eta = self.objective.derivatives(theta)
        g = grad[index]
        for expected in (False, True):
            if expected:
                _, _, H, _ = self.objective.derivatives(theta, expected=True)
            try:
                return ll, grad, linalg.solve(H[np.ix_(index, index)], g, assume_a='pos')
            except (linalg.LinAlgError, ValueError):
                continue
        logger.debug('Information not positive definite, taking a gradient step. '
                     'model="%s"', self.name)
        return ll, grad, g / max(1.0, float(np.linalg.norm(g)))

    def step(self, theta, index=None):
        """One line-searched step; returns (theta, loglik, gradient, accepted)."""
        if index is None:
            index = np.arange(theta.size)
        ll, grad, delta = self.direction(theta, index)
        scale = 1.0
        for _ in range(self.options.step_halvings + 1):
            candidate = theta.copy()
            candidate[index] += scale * delta
            try:
                value = self.objective.loglik(candidate)
            except NumericalError:
                value = -np.inf
            if value > ll:
                return candidate, value, grad, True
            scale *= 0.5
        return theta, ll, grad, False

    def stationary(self, grad):
        return float(np.max(np.abs(grad), initial=0.0)) <= 1e-5 * max(self.objective.n, 1)

    def run(self, theta, max_iter=None, blocks=None):
        opts = self.options
        max_iter = opts.max_iter if max_iter is None else max_iter
        theta = np.asarray(theta, dtype=float).copy()
        ll = self.objective.loglik(theta)
        trace = [ll]
        converged = False
        grad = np.zeros_like(theta)
        iterations = 0
        groups = blocks or [None]
        for iterations in range(1, max_iter + 1):
            start = ll
            moved = False
            for index in groups:
                theta, ll, grad, accepted = self.step(theta, index)
                moved = moved or accepted
            if not moved:
                converged = self.stationary(grad)
                break
            trace.append(ll)
            if abs(ll - start) / (abs(ll) + 0.1) < opts.tolerance:
                converged = True
                break
        return theta, ll, trace, iterations, converged


def fit_design(link, structure, X, y, options=None, offset=None, start=None,
               name='model'):
    """Fit a link/structure pair to 0-based codes ``y``; returns a Solution."""
    options = options or FitOptions()
    objective = Objective(link, structure, X, y, offset)
    if start is None:
        counts = np.bincount(y, minlength=link.K).astype(float)
        start = structure.start(link.initial_intercepts(counts / counts.sum()))
    solver = NewtonSolver(objective, options, name)

    blocks = structure.blocks()
    if blocks:
        theta, ll, trace, outer, converged = solver.run(
            start, max_iter=options.max_alternations, blocks=blocks)
        # joint polish: the alternation converges only linearly
        theta, ll, polish_trace, inner, polished = solver.run(theta)
        trace = trace + polish_trace[1:]
        iterations = outer + inner
        converged = converged or polished
    else:
        theta, ll, trace, iterations, converged = solver.run(start)

    _, grad = objective.gradient(theta)
    eta_max = float(np.max(np.abs(objective.eta(theta)), initial=0.0))
    warnings = []
    if not converged:
        warnings.append('did not converge within {} iterations'.format(iterations))
        if eta_max > settings.ORDCAL_SEPARATION_THRESHOLD:
            warnings.append('possible complete or quasi-complete separation '
                            '(max |linear predictor| = {:.1f})'.format(eta_max))
    for message in warnings:
        logger.warning('Fit warning. model="%s" warning="%s"', name, message)
    logger.debug('Fitted likelihood. model="%s" loglik="%s" iterations="%s" converged="%s"',
                 name, ll, iterations, converged)
    return Solution(theta=theta, loglik=ll, iterations=iterations,
                    converged=converged, trace=tuple(trace),
                    gradient_norm=float(np.linalg.norm(grad)), eta_max=eta_max,
                    warnings=tuple(warnings))


def _check_fittable(data, spec, reference):
    if not isinstance(data, Dataset):
        raise DatasetError('expected a Dataset')
    if data.Q < 1:
        raise DatasetError('at least one predictor column is required')
    data.require_all_categories()
    count = param_count(spec, data.Q, data.K)
    if data.n <= count:
        msg = 'need more rows ({}) than parameters ({}) to fit {}'
        raise DatasetError(msg.format(data.n, count, spec.flag))
    if reference != 1 and spec.family != MULTINOMIAL:
        raise SpecificationError('a reference category applies to the multinomial model only')
    if not 1 <= reference <= data.K:
        raise SpecificationError('reference category {} outside 1..{}'.format(reference, data.K))


def _stereotype_start(data, options, structure):
    warm = fit(data, ModelSpec(ADJACENT, True), options)
    theta = structure.start(np.cumsum(warm.alpha))
    theta[data.K - 1:data.K - 1 + data.Q] = warm.B.ravel()
    return theta


def fit(data, spec, options=None, offset=None):
    """Fit ``spec`` to ``data`` by maximum likelihood."""
    options = options or FitOptions()
    _check_fittable(data, spec, options.reference)
    K, Q = data.K, data.Q
    order = category_order(K, options.reference)
    codes = np.empty(K, dtype=int)
    codes[order] = np.arange(K)
    y = codes[data.outcomes - 1]

    link = link_for(spec, K)
    structure = structure_for(spec, Q, K)
    start = None
    if spec.family == STEREOTYPE and K > 2:
        start = _stereotype_start(data, options, structure)

    solution = fit_design(link, structure, data.predictors, y, options,
                          offset=offset, start=start, name=spec.flag)
    alpha, B, phi = structure.unpack(solution.theta)

    model = FittedModel(
        spec=spec, Q=Q, K=K, columns=data.columns, alpha=alpha, B=B, phi=phi,
        loglik=solution.loglik, iterations=solution.iterations,
        converged=solution.converged, tolerance=options.tolerance,
        loglik_trace=solution.trace, gradient_norm=solution.gradient_norm,
        warnings=solution.warnings, reference=options.reference, n=data.n,
    )
    if model.intercept_ordering() is False and spec.proportional:
        logger.warning('Cumulative intercepts are not ordered. model="%s"', spec.flag)
    logger.info('Fitted model. family="%s" n="%s" loglik="%.6f" iterations="%s" converged="%s"',
                spec.flag, data.n, model.loglik, model.iterations, model.converged)
    return model


def linear_predictors(model, X):
    return model.linear_predictors(X)


def predict_probs(model, X):
    return model.predict(X)


def cumulative_validity(model, X):
    return model.validity(X)


def nll_and_gradient(params, data, spec, reference=1):
    """Negative log-likelihood and its gradient in the flat parameter layout."""
    params = np.asarray(params, dtype=float)
    structure = structure_for(spec, data.Q, data.K)
    if params.shape != (structure.size,):
        msg = 'expected {} parameters for {}, got {}'
        raise SpecificationError(msg.format(structure.size, spec.flag, params.size))
    order = category_order(data.K, reference)
    codes = np.empty(data.K, dtype=int)
    codes[order] = np.arange(data.K)
    objective = Objective(link_for(spec, data.K), structure, data.predictors,
                          codes[data.outcomes - 1])
    ll, grad = objective.gradient(params)
    return -ll, -grad


def events_per_parameter(data, spec):
    """Smallest category count divided by the number of parameters."""
    return float(data.counts().min()) / param_count(spec, data.Q, data.K)


@dataclass(frozen=True)
class LRTestResult:
    predictor: str
    statistic: float
    df: int
    p_value: float
    loglik_proportional: float
    loglik_relaxed: float


def lr_test_proportionality(data, q, options=None, proportional=None):
    """Likelihood ratio test of proportional odds for predictor ``q`` (0-based)
    in the cumulative logit model."""
    if data.K < 3:
        raise SpecificationError('the proportional odds test needs K >= 3')
    if not 0 <= q < data.Q:
        raise SpecificationError('predictor index {} outside 0..{}'.format(q, data.Q - 1))
    name = data.columns[q]
    options = options or FitOptions()
    if proportional is None:
        proportional = fit(data, ModelSpec(CUMULATIVE, True), options)
    if not proportional.converged:
        raise LRTestError(name, 'the proportional odds model did not converge')
    try:
        relaxed = fit(data, ModelSpec(CUMULATIVE, True, relaxed=(q,)), options)
    except NumericalError as exc:
        raise LRTestError(name, str(exc))
    if not relaxed.converged:
        raise LRTestError(name, 'the relaxed model did not converge')
    report = relaxed.validity(data.predictors)
    invalid = ~relaxed.predict(data.predictors).valid
    if report.count or np.any(invalid):
        raise LRTestError(name, 'the relaxed model gives negative probabilities')

    statistic = 2.0 * (relaxed.loglik - proportional.loglik)
    scale = options.tolerance * (abs(proportional.loglik) + 0.1) * 10
    if statistic < 0:
        if statistic < -scale:
            logger.warning('Negative likelihood ratio statistic. predictor="%s" value="%s"',
                           name, statistic)
        statistic = 0.0
    df = data.K - 2
    p_value = float(stats.chi2.sf(statistic, df))
    logger.info('Proportional odds test. predictor="%s" statistic="%.4f" df="%s" p="%.4g"',
                name, statistic, df, p_value)
    return LRTestResult(name, float(statistic), df, p_value,
                        proportional.loglik, relaxed.loglik)


def lr_test_table(data, options=None):
    """The proportional odds test for every predictor."""
    options = options or FitOptions()
    proportional = fit(data, ModelSpec(CUMULATIVE, True), options)
    return [lr_test_proportionality(data, q, options, proportional)
            for q in range(data.Q)]


def require_converged(model):
    if not model.converged:
        raise ConvergenceError(model.spec.flag, '; '.join(model.warnings))
    return model
