"""Built-in simulation scenarios.

Two kinds of truth are encoded:

* MLR form: draw the outcome from the class priors, then every predictor
  independently given the class (Normal with unit variance, or Bernoulli
  with a class-specific prevalence). The posterior risks then have an
  exact multinomial logistic form.
* CLPO form: draw the predictors from their marginal law, then the outcome
  from a cumulative logit model with proportional odds. Scenarios 1-3 and 9
  reuse the predictor law of MLR scenario 1 (a balanced mixture of unit
  Normals around the equidistant class means), which is where their
  coefficients come from: they are the large-sample cumulative refit on
  that design. The remaining ones draw standard Normal or Bernoulli(0.5)
  predictors independently.

CLPO parameters are stored as tabulated, in the convention
``logit P(Y <= k) = alpha_k + beta'x``. Our cumulative link models
``logit P(Y >= k+1)``, so the true cumulative model has intercepts
``-alpha`` and coefficients ``-beta`` (see ``Scenario.bayes_parameters``).
"""
import logging
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from scipy import special

from ordcal.errors import SpecificationError
from ordcal.families import CumulativeLink, MultinomialLink

logger = logging.getLogger(__name__)

MLR_FORM = 'mlr'
CLPO_FORM = 'clpo'
FORMS = (MLR_FORM, CLPO_FORM)

CONTINUOUS = 'continuous'
BINARY = 'binary'

QUADRATURE_POINTS = 80


@dataclass(frozen=True)
class Scenario:
    form: str
    number: int
    kinds: tuple
    K: int
    priors: tuple = None
    means: tuple = None
    alpha: tuple = None
    beta: tuple = None
    orc: float = None
    description: str = ''
    tabulated_priors: tuple = None
    notes: str = ''
    mixture_priors: tuple = None
    mixture_means: tuple = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.form not in FORMS:
            raise SpecificationError('unknown truth form "{}"'.format(self.form))
        if any(kind not in (CONTINUOUS, BINARY) for kind in self.kinds):
            raise SpecificationError('predictor kinds must be continuous or binary')
        if self.form == MLR_FORM:
            if len(self.means) != self.Q or any(len(row) != self.K for row in self.means):
                raise SpecificationError('{}: means must be Q x K'.format(self.id))
            if len(self.priors) != self.K or abs(sum(self.priors) - 1.0) > 1e-9:
                raise SpecificationError('{}: priors must be K values summing to 1'.format(
                    self.id))
        else:
            if len(self.alpha) != self.K - 1 or len(self.beta) != self.Q:
                raise SpecificationError('{}: need K-1 intercepts and Q slopes'.format(
                    self.id))
            if self.mixture_priors is not None:
                if any(kind != CONTINUOUS for kind in self.kinds):
                    raise SpecificationError('{}: mixture marginals need continuous '
                                             'predictors'.format(self.id))
                if (len(self.mixture_means) != self.Q or
                        any(len(row) != len(self.mixture_priors)
                            for row in self.mixture_means)):
                    raise SpecificationError('{}: mixture means must be Q x '
                                             'components'.format(self.id))
            object.__setattr__(self, 'priors', tuple(self.exact_priors()))

    @property
    def id(self):
        return '{}-{}'.format(self.form, self.number)

    @property
    def Q(self):
        return len(self.kinds)

    @property
    def columns(self):
        return tuple('x{}'.format(q + 1) for q in range(self.Q))

    def bayes_parameters(self):
        """True (alpha, B) of the generating model in fitted-model form.

        MLR form: intercepts and Q x (K-1) coefficients against category 1.
        CLPO form: cumulative P(Y >= k+1) intercepts and a Q x 1 column.
        """
        if 'bayes' in self._cache:
            return self._cache['bayes']
        if self.form == CLPO_FORM:
            result = (-np.asarray(self.alpha, dtype=float),
                      -np.asarray(self.beta, dtype=float).reshape(self.Q, 1))
        else:
            priors = np.asarray(self.priors, dtype=float)
            alpha = np.log(priors[1:] / priors[0])
            B = np.zeros((self.Q, self.K - 1))
            for q, (kind, row) in enumerate(zip(self.kinds, self.means)):
                row = np.asarray(row, dtype=float)
                if kind == CONTINUOUS:
                    B[q] = row[1:] - row[0]
                    alpha -= 0.5 * (row[1:] ** 2 - row[0] ** 2)
                else:
                    B[q] = special.logit(row[1:]) - special.logit(row[0])
                    alpha += np.log((1.0 - row[1:]) / (1.0 - row[0]))
            result = (alpha, B)
        self._cache['bayes'] = result
        return result

    def linear_predictors(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.Q:
            raise SpecificationError('{} expects {} predictor columns'.format(self.id, self.Q))
        alpha, B = self.bayes_parameters()
        return alpha[None, :] + X @ B

    def true_risks(self, X):
        eta = self.linear_predictors(X)
        if self.form == CLPO_FORM:
            return CumulativeLink(self.K).probabilities(eta)
        return MultinomialLink(self.K).probabilities(eta)

    def _components(self, beta, binary):
        """(weight, linear predictor shift) per component of the predictor law."""
        if self.mixture_priors is not None:
            means = np.asarray(self.mixture_means, dtype=float)
            return [(float(weight), float(-beta @ means[:, c]))
                    for c, weight in enumerate(self.mixture_priors)]
        return [(0.5 ** binary.size, float(np.dot(-beta[binary], pattern)))
                for pattern in product((0.0, 1.0), repeat=binary.size)]

    def exact_priors(self):
        """Marginal outcome distribution of a CLPO scenario: mixture components
        and binary predictor patterns enumerated, the continuous part
        integrated by Gauss-Hermite quadrature over its Normal linear
        predictor."""
        beta = np.asarray(self.beta, dtype=float)
        continuous = np.array([k == CONTINUOUS for k in self.kinds])
        scale = float(np.sqrt(np.sum(beta[continuous] ** 2)))
        nodes, weights = hermegauss(QUADRATURE_POINTS)
        weights = weights / weights.sum()
        binary = np.flatnonzero(~continuous)
        link = CumulativeLink(self.K)
        alpha = -np.asarray(self.alpha, dtype=float)
        priors = np.zeros(self.K)
        for weight, shift in self._components(beta, binary):
            eta = alpha[None, :] + (shift + scale * nodes)[:, None]
            priors += weight * (weights @ link.probabilities(eta))
        return priors / priors.sum()


def _mlr(number, kinds, priors, means, orc, description):
    return Scenario(MLR_FORM, number, tuple(kinds), len(priors), priors=tuple(priors),
                    means=tuple(tuple(row) for row in means), orc=orc,
                    description=description)


def _clpo(number, kinds, alpha, beta, tabulated, orc, description, notes='', mixture=None):
    mixture_priors, mixture_means = mixture or (None, None)
    return Scenario(CLPO_FORM, number, tuple(kinds), len(alpha) + 1, alpha=tuple(alpha),
                    beta=tuple(beta), orc=orc, description=description,
                    tabulated_priors=tuple(tabulated), notes=notes,
                    mixture_priors=mixture_priors, mixture_means=mixture_means)


EQUIDISTANT = ((0.0, 0.4, 0.8), (0.0, 0.3, 0.6), (0.0, 0.4, 0.8), (0.0, 0.3, 0.6))
NON_EQUIDISTANT = ((0.0, 0.7, 0.8), (0.0, 0.6, 0.6), (0.0, 0.5, 0.8), (0.0, 0.1, 0.6))
FOUR_CATEGORY_WEAK = ((0.0, 0.0, 0.6, 0.6), (0.0, 0.4, 0.4, 0.5), (0.1, 0.0, 0.6, 0.7))
BALANCED3 = (1 / 3.0, 1 / 3.0, 1 / 3.0)
IMBALANCED3 = (0.55, 0.30, 0.15)
C4 = (CONTINUOUS,) * 4
C3 = (CONTINUOUS,) * 3
STANDARD_BETA = (-0.55, -0.41, -0.55, -0.41)
REFIT_NOTE = ('parameters are the large-sample cumulative refit estimates reported for '
              'this scenario; the tabulated row repeats scenario 1')
MLR1_PREDICTORS = (BALANCED3, EQUIDISTANT)


def builtin_scenarios():
    """All built-in scenarios keyed by id ("mlr-1" .. "mlr-11", "clpo-1" .. "clpo-9")."""
    scenarios = [
        _mlr(1, C4, BALANCED3, EQUIDISTANT, 0.74, 'balanced outcome, equidistant means'),
        _mlr(2, C4, IMBALANCED3, EQUIDISTANT, 0.74, 'imbalanced outcome, equidistant means'),
        _mlr(3, C4, BALANCED3, NON_EQUIDISTANT, 0.74,
             'balanced outcome, non-equidistant means'),
        _mlr(4, C4, IMBALANCED3, NON_EQUIDISTANT, 0.74,
             'imbalanced outcome, non-equidistant means'),
        _mlr(5, C4, IMBALANCED3,
             ((0.0, 0.7, 0.8), (0.0, 0.7, 0.6), (0.0, 0.0, 1.0), (0.3, 0.0, 0.3)), 0.74,
             'imbalanced outcome, highly non-equidistant means'),
        _mlr(6, C3, (0.40, 0.25, 0.20, 0.15),
             ((0.0, 0.0, 1.0, 1.0), (0.0, 0.8, 0.8, 0.9), (0.2, 0.0, 0.9, 1.0)), 0.74,
             'K=4, imbalanced outcome, highly non-equidistant means'),
        _mlr(7, C3, (0.40, 0.25, 0.20, 0.15), FOUR_CATEGORY_WEAK, 0.66,
             'K=4, weaker predictors, imbalanced outcome'),
        _mlr(8, C3, (0.45, 0.30, 0.20, 0.05), FOUR_CATEGORY_WEAK, 0.66,
             'K=4, weaker predictors, highly imbalanced outcome'),
        _mlr(9, (BINARY,) * 4, IMBALANCED3,
             ((0.20, 0.55, 0.58), (0.20, 0.50, 0.50), (0.20, 0.45, 0.58),
              (0.20, 0.25, 0.50)), 0.74, 'binary predictors, imbalanced outcome'),
        _mlr(10, (BINARY,) * 3, (0.40, 0.25, 0.20, 0.15),
             ((0.20, 0.20, 0.65, 0.65), (0.20, 0.40, 0.40, 0.60), (0.25, 0.20, 0.60, 0.70)),
             0.74, 'K=4, binary predictors, imbalanced outcome'),
        _mlr(11, (CONTINUOUS,) * 8, IMBALANCED3, NON_EQUIDISTANT + ((0.0, 0.0, 0.0),) * 4,
             0.74, 'scenario 4 plus four noise predictors'),

        _clpo(1, C4, (-0.18, 1.55), STANDARD_BETA, BALANCED3, 0.74, 'balanced outcome',
              mixture=MLR1_PREDICTORS),
        _clpo(2, C4, (0.92, 2.80), (-0.53, -0.39, -0.53, -0.39), IMBALANCED3, 0.74,
              'imbalanced outcome', mixture=MLR1_PREDICTORS),
        _clpo(3, C4, (1.73, 4.15), (-0.53, -0.39, -0.53, -0.39), (0.70, 0.25, 0.05), 0.74,
              'highly imbalanced outcome', mixture=MLR1_PREDICTORS),
        _clpo(4, C3, (-0.12, 1.22, 2.62), (-0.54, -0.47, -0.51), IMBALANCED3, 0.74,
              'K=4, imbalanced outcome'),
        _clpo(5, C3, (-0.05, 1.10, 2.35), (-0.54, -0.47, -0.51), IMBALANCED3, 0.66,
              'K=4, weaker predictors, imbalanced outcome'),
        _clpo(6, C3, (0.18, 1.63, 3.58), (-0.54, -0.47, -0.50), (0.70, 0.25, 0.05), 0.66,
              'K=4, highly imbalanced outcome', REFIT_NOTE),
        _clpo(7, (BINARY,) * 4, (2.03, 3.94), (-1.39, -1.09, -1.22, -0.82), IMBALANCED3,
              0.74, 'binary predictors, imbalanced outcome', REFIT_NOTE),
        _clpo(8, (BINARY,) * 3, (1.52, 2.88, 4.30), (-1.75, -1.20, -1.46), IMBALANCED3,
              0.74, 'K=4, binary predictors, imbalanced outcome', REFIT_NOTE),
        _clpo(9, (CONTINUOUS,) * 8, (-0.18, 1.55), STANDARD_BETA + (0.0,) * 4, BALANCED3,
              0.74, 'scenario 1 plus four noise predictors',
              mixture=(BALANCED3, EQUIDISTANT + ((0.0, 0.0, 0.0),) * 4)),
    ]
    return {scenario.id: scenario for scenario in scenarios}


def get_scenario(identifier, number=None):
    """Look up "mlr-3", or ("mlr", 3)."""
    key = identifier if number is None else '{}-{}'.format(identifier, number)
    registry = builtin_scenarios()
    try:
        return registry[key.lower()]
    except KeyError:
        raise SpecificationError('unknown scenario "{}", choose from {}'.format(
            key, ', '.join(registry)))


def select_scenarios(truth=None, numbers=None):
    """Scenarios of one truth form (or both), optionally by number."""
    registry = builtin_scenarios()
    if truth is not None and truth not in FORMS:
        raise SpecificationError('unknown truth form "{}", choose from {}'.format(
            truth, ', '.join(FORMS)))
    if numbers:
        if truth is None:
            raise SpecificationError('scenario numbers need a truth form')
        return [get_scenario(truth, number) for number in numbers]
    return [s for s in registry.values() if truth is None or s.form == truth]
