"""Ordinal model families.

A fitted model is described by three pieces:

* a ``ModelSpec`` naming the family and its proportionality structure;
* a link (``MultinomialLink``, ``AdjacentLink``, ``CumulativeLink``,
  ``ContinuationLink``) turning the K-1 linear predictors of a case into
  K category probabilities;
* a parameter structure mapping the flat parameter vector onto the
  coefficient matrix ``C`` of shape (Q+1) x (K-1) whose first row holds the
  intercepts, so that ``eta = [1, X] @ C + offset``.

Flat parameter layout (documented for serialized models):

* intercepts alpha_1..alpha_{K-1};
* non-proportional: coefficients B (Q x (K-1)) column-major, i.e. all Q
  coefficients of equation 1, then equation 2, ...;
* proportional: the shared beta (Q);
* stereotype: the shared beta (Q), then the free scaling factors
  phi_3..phi_K (equation 2 has phi fixed to 1);
* partial proportional (likelihood ratio test only): shared beta, then for
  each relaxed predictor its deviations on equations 2..K-1.

Category codes inside this module are 0-based.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import SpecificationError

logger = logging.getLogger(__name__)

MULTINOMIAL = 'multinomial'
CUMULATIVE = 'cumulative'
ADJACENT = 'adjacent'
CONTINUATION = 'continuation'
STEREOTYPE = 'stereotype'

FAMILIES = (MULTINOMIAL, CUMULATIVE, ADJACENT, CONTINUATION, STEREOTYPE)
ORDINAL_FAMILIES = (CUMULATIVE, ADJACENT, CONTINUATION)


@dataclass(frozen=True)
class ModelSpec:
    family: str
    proportional: bool = None
    relaxed: tuple = ()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise SpecificationError('unknown family "{}"'.format(self.family))
        if self.family == MULTINOMIAL:
            if self.proportional:
                raise SpecificationError(
                    'the multinomial model is inherently non-proportional')
            object.__setattr__(self, 'proportional', False)
        elif self.family == STEREOTYPE:
            if self.proportional is not None:
                raise SpecificationError(
                    'the stereotype model carries no proportional flag')
        elif self.proportional is None:
            raise SpecificationError(
                '{} models need proportional=True or False'.format(self.family))
        relaxed = tuple(sorted(set(int(q) for q in self.relaxed)))
        if relaxed and not (self.family in ORDINAL_FAMILIES and self.proportional):
            raise SpecificationError(
                'predictor relaxation applies to proportional ordinal models only')
        object.__setattr__(self, 'relaxed', relaxed)

    @property
    def flag(self):
        for flag, spec in FAMILY_FLAGS.items():
            if spec == self:
                return flag
        return '{}-partial{}'.format(self.family, list(self.relaxed))

    @property
    def is_proportional(self):
        return bool(self.proportional) and self.family in ORDINAL_FAMILIES

    @property
    def uses_model_family_per_lp(self):
        """Proportional families are recalibrated one linear predictor at a time."""
        return self.is_proportional and not self.relaxed

    @classmethod
    def from_flag(cls, flag):
        try:
            return FAMILY_FLAGS[flag.lower()]
        except KeyError:
            msg = 'unknown family "{}", choose from {}'
            raise SpecificationError(msg.format(flag, ', '.join(FAMILY_FLAGS)))

    def __str__(self):
        return self.flag


FAMILY_FLAGS = {
    'mlr': ModelSpec(MULTINOMIAL, False),
    'cl-po': ModelSpec(CUMULATIVE, True),
    'cl-np': ModelSpec(CUMULATIVE, False),
    'ac-po': ModelSpec(ADJACENT, True),
    'ac-np': ModelSpec(ADJACENT, False),
    'cr-po': ModelSpec(CONTINUATION, True),
    'cr-np': ModelSpec(CONTINUATION, False),
    'slm': ModelSpec(STEREOTYPE),
}


def parse_families(value):
    """'mlr, cl-po' -> [ModelSpec, ModelSpec]."""
    flags = [flag.strip().lower() for flag in value.split(',') if flag.strip()]
    if not flags:
        raise SpecificationError('no model family given')
    return [ModelSpec.from_flag(flag) for flag in flags]


def param_count(spec, Q, K):
    if Q < 1 or K < 2:
        raise SpecificationError('need Q >= 1 and K >= 2, got Q={} K={}'.format(Q, K))
    if not isinstance(spec, ModelSpec):
        raise SpecificationError(spec)
    return structure_for(spec, Q, K).size


# Links ---------------------------------------------------------------------

class Link(object):
    """Maps linear predictors eta (n x (K-1)) to category probabilities."""
    name = None

    def __init__(self, K):
        self.K = K

    def probabilities(self, eta):
        raise NotImplementedError

    def evaluate(self, eta, y):
        """Per-case log-likelihood, score d(loglik)/d(eta) and observed
        information -d2(loglik)/d(eta)2 for category codes ``y``."""
        raise NotImplementedError

    def expected_information(self, eta):
        raise NotImplementedError

    def initial_intercepts(self, frequencies):
        raise NotImplementedError


class SoftmaxLink(Link):
    """Families whose category log-odds against category 1 are linear in
    eta: S = A @ eta, p = softmax(S)."""

    def __init__(self, K):
        super(SoftmaxLink, self).__init__(K)
        self.A = self.build_map(K)

    @staticmethod
    def build_map(K):
        raise NotImplementedError

    def logits(self, eta):
        return eta @ self.A.T

    def probabilities(self, eta):
        S = self.logits(eta)
        return special.softmax(S, axis=1)

    def evaluate(self, eta, y):
        S = self.logits(eta)
        log_norm = special.logsumexp(S, axis=1)
        rows = np.arange(S.shape[0])
        loglik = S[rows, y] - log_norm
        p = np.exp(S - log_norm[:, None])
        residual = -p
        residual[rows, y] += 1.0
        score = residual @ self.A
        return loglik, score, self._information(p)

    def _information(self, p):
        # A' (diag(p) - p p') A
        PA = p[:, :, None] * self.A[None, :, :]
        pA = p @ self.A
        return np.einsum('kj,ikl->ijl', self.A, PA) - pA[:, :, None] * pA[:, None, :]

    def expected_information(self, eta):
        return self._information(self.probabilities(eta))


class MultinomialLink(SoftmaxLink):
    name = 'multinomial'

    @staticmethod
    def build_map(K):
        A = np.zeros((K, K - 1))
        A[1:, :] = np.eye(K - 1)
        return A

    def initial_intercepts(self, frequencies):
        return np.log(frequencies[1:] / frequencies[0])


class AdjacentLink(SoftmaxLink):
    """log(P(Y=k+1)/P(Y=k)) = eta_k, so log(P(Y=c)/P(Y=1)) = sum_{j<c} eta_j."""
    name = 'adjacent'

    @staticmethod
    def build_map(K):
        return np.tril(np.ones((K, K - 1)), k=-1)

    def initial_intercepts(self, frequencies):
        return np.log(frequencies[1:] / frequencies[:-1])


class CumulativeLink(Link):
    """logit P(Y >= k+1) = eta_k (0-based k); P(Y=c) by differencing."""
    name = 'cumulative'

    def exceedance(self, eta):
        gamma = special.expit(eta)
        n = eta.shape[0]
        return np.hstack([np.ones((n, 1)), gamma, np.zeros((n, 1))])

    def probabilities(self, eta):
        V = self.exceedance(eta)
        return V[:, :-1] - V[:, 1:]

    def evaluate(self, eta, y):
        n, m = eta.shape
        rows = np.arange(n)
        gamma = special.expit(eta)
        d1 = gamma * (1.0 - gamma)
        d2 = d1 * (1.0 - 2.0 * gamma)

        V = self.exceedance(eta)
        upper = V[rows, y]
        lower = V[rows, y + 1]
        with np.errstate(divide='ignore', invalid='ignore'):
            p = upper - lower
            loglik = np.log(p)

        has_upper = y >= 1
        has_lower = y <= m - 1
        iu = np.clip(y - 1, 0, m - 1)
        il = np.clip(y, 0, m - 1)
        u1 = np.where(has_upper, d1[rows, iu], 0.0)
        u2 = np.where(has_upper, d2[rows, iu], 0.0)
        v1 = np.where(has_lower, d1[rows, il], 0.0)
        v2 = np.where(has_lower, d2[rows, il], 0.0)

        with np.errstate(divide='ignore', invalid='ignore'):
            score = np.zeros((n, m))
            info = np.zeros((n, m, m))
            up = has_upper.nonzero()[0]
            lo = has_lower.nonzero()[0]
            score[up, iu[up]] += u1[up] / p[up]
            score[lo, il[lo]] -= v1[lo] / p[lo]
            info[up, iu[up], iu[up]] += (u1[up] / p[up]) ** 2 - u2[up] / p[up]
            info[lo, il[lo], il[lo]] += (v1[lo] / p[lo]) ** 2 + v2[lo] / p[lo]
            both = (has_upper & has_lower).nonzero()[0]
            cross = -u1[both] * v1[both] / p[both] ** 2
            info[both, iu[both], il[both]] += cross
            info[both, il[both], iu[both]] += cross
        return loglik, score, info

    def expected_information(self, eta):
        gamma = special.expit(eta)
        d1 = gamma * (1.0 - gamma)
        p = np.maximum(np.abs(self.probabilities(eta)), 1e-300)
        # J[c, j] = d1_j * (delta_{c-1,j} - delta_{c,j}); W = J' diag(1/p) J
        inv = 1.0 / p
        m = eta.shape[1]
        info = np.zeros((eta.shape[0], m, m))
        idx = np.arange(m)
        info[:, idx, idx] = d1 ** 2 * (inv[:, :-1] + inv[:, 1:])
        if m > 1:
            off = -d1[:, :-1] * d1[:, 1:] * inv[:, 1:-1]
            info[:, idx[:-1], idx[1:]] = off
            info[:, idx[1:], idx[:-1]] = off
        return info

    def initial_intercepts(self, frequencies):
        upper = np.cumsum(frequencies[::-1])[::-1][1:]
        return np.log(upper / (1.0 - upper))


class ContinuationLink(Link):
    """logit P(Y > k | Y >= k) = eta_k (0-based k); P(Y=K) is the remainder.

    Writing the equations for the stopping event P(Y = k | Y >= k) instead
    negates eta and describes the same set of probability models.
    """
    name = 'continuation'

    def probabilities(self, eta):
        n, m = eta.shape
        log_go = special.log_expit(eta)
        log_stop = special.log_expit(-eta)
        log_reach = np.hstack([np.zeros((n, 1)), np.cumsum(log_go, axis=1)])
        logp = log_reach.copy()
        logp[:, :m] += log_stop
        return np.exp(logp)

    def evaluate(self, eta, y):
        n, m = eta.shape
        s = special.expit(eta)
        log_go = special.log_expit(eta)
        log_stop = special.log_expit(-eta)
        cols = np.arange(m)[None, :]
        passed = cols < y[:, None]
        stopped = (cols == y[:, None])
        loglik = np.where(passed, log_go, 0.0).sum(axis=1) + \
            np.where(stopped, log_stop, 0.0).sum(axis=1)
        score = np.where(passed, 1.0 - s, 0.0) - np.where(stopped, s, 0.0)
        at_risk = passed | stopped
        info = np.zeros((n, m, m))
        info[:, np.arange(m), np.arange(m)] = np.where(at_risk, s * (1.0 - s), 0.0)
        return loglik, score, info

    def expected_information(self, eta):
        n, m = eta.shape
        s = special.expit(eta)
        reach = np.hstack([np.ones((n, 1)), np.cumprod(s, axis=1)])[:, :m]
        info = np.zeros((n, m, m))
        info[:, np.arange(m), np.arange(m)] = reach * s * (1.0 - s)
        return info

    def initial_intercepts(self, frequencies):
        at_least = np.cumsum(frequencies[::-1])[::-1]
        go = at_least[1:] / at_least[:-1]
        return np.log(go / (1.0 - go))


LINKS = {
    MULTINOMIAL: MultinomialLink,
    STEREOTYPE: MultinomialLink,
    ADJACENT: AdjacentLink,
    CUMULATIVE: CumulativeLink,
    CONTINUATION: ContinuationLink,
}


def link_for(spec, K):
    family = spec.family if isinstance(spec, ModelSpec) else spec
    return LINKS[family](K)


# Parameter structures ------------------------------------------------------

class Structure(object):
    """Maps a flat parameter vector to the coefficient matrix C."""
    bilinear = False

    def __init__(self, Q, K):
        self.Q = Q
        self.K = K
        self.m = K - 1
        self.size = self._size()

    def _size(self):
        raise NotImplementedError

    def coefficients(self, theta):
        raise NotImplementedError

    def derivative(self, theta):
        """d vec(C) / d theta, with vec stacking the columns of C."""
        raise NotImplementedError

    def curvature(self, theta, grad_C):
        """Second-order term of the chain rule; zero for linear structures."""
        return None

    def start(self, intercepts):
        theta = np.zeros(self.size)
        theta[:self.m] = intercepts
        return theta

    def unpack(self, theta):
        """(alpha, B, phi) as stored on a fitted model."""
        raise NotImplementedError

    def pack(self, alpha, B, phi=None):
        raise NotImplementedError

    def blocks(self):
        return None


class LinearStructure(Structure):

    def __init__(self, Q, K):
        super(LinearStructure, self).__init__(Q, K)
        self._T = self._build()

    def _build(self):
        raise NotImplementedError

    def _index(self, row, equation):
        return equation * (self.Q + 1) + row

    def coefficients(self, theta):
        return (self._T @ theta).reshape(self.m, self.Q + 1).T

    def derivative(self, theta):
        return self._T


class FreeStructure(LinearStructure):
    """Every equation has its own coefficients (non-proportional)."""

    def _size(self):
        return (self.Q + 1) * self.m

    def _build(self):
        T = np.zeros(((self.Q + 1) * self.m, self.size))
        for k in range(self.m):
            T[self._index(0, k), k] = 1.0
            for q in range(self.Q):
                T[self._index(q + 1, k), self.m + k * self.Q + q] = 1.0
        return T

    def unpack(self, theta):
        alpha = np.asarray(theta[:self.m], dtype=float)
        B = np.asarray(theta[self.m:], dtype=float).reshape(self.m, self.Q).T
        return alpha, B, None

    def pack(self, alpha, B, phi=None):
        B = np.asarray(B, dtype=float).reshape(self.Q, self.m)
        return np.concatenate([alpha, B.flatten(order='F')])


class ProportionalStructure(LinearStructure):
    """One shared coefficient per predictor, optionally freeing some
    predictors with per-equation deviations (equations 2..K-1)."""

    def __init__(self, Q, K, relaxed=()):
        self.relaxed = tuple(relaxed)
        for q in self.relaxed:
            if not 0 <= q < Q:
                raise SpecificationError('relaxed predictor {} out of range'.format(q))
        super(ProportionalStructure, self).__init__(Q, K)

    def _size(self):
        return self.Q + self.m + len(self.relaxed) * (self.m - 1)

    def _build(self):
        T = np.zeros(((self.Q + 1) * self.m, self.size))
        for k in range(self.m):
            T[self._index(0, k), k] = 1.0
            for q in range(self.Q):
                T[self._index(q + 1, k), self.m + q] = 1.0
        base = self.m + self.Q
        for r, q in enumerate(self.relaxed):
            for k in range(1, self.m):
                T[self._index(q + 1, k), base + r * (self.m - 1) + k - 1] = 1.0
        return T

    def unpack(self, theta):
        alpha = np.asarray(theta[:self.m], dtype=float)
        if self.relaxed:
            return alpha, self.coefficients(theta)[1:, :], None
        return alpha, np.asarray(theta[self.m:], dtype=float).reshape(self.Q, 1), None

    def pack(self, alpha, B, phi=None):
        if self.relaxed:
            raise SpecificationError('partial proportional models are not stored')
        return np.concatenate([alpha, np.asarray(B, dtype=float).ravel()])


class DiagonalStructure(LinearStructure):
    """Equation k uses only covariate k: eta_k = a_k + b_k * x_k.

    Used for calibration models where x_k is the k-th linear predictor.
    """

    def __init__(self, K):
        super(DiagonalStructure, self).__init__(K - 1, K)

    def _size(self):
        return 2 * self.m

    def _build(self):
        T = np.zeros(((self.Q + 1) * self.m, self.size))
        for k in range(self.m):
            T[self._index(0, k), k] = 1.0
            T[self._index(k + 1, k), self.m + k] = 1.0
        return T

    def unpack(self, theta):
        return (np.asarray(theta[:self.m], dtype=float),
                np.asarray(theta[self.m:], dtype=float).reshape(1, self.m), None)


class StereotypeStructure(Structure):
    """eta_k = alpha_k + phi_k * beta'x with phi_1 = 1."""
    bilinear = True

    def _size(self):
        return self.m + self.Q + max(self.m - 1, 0)

    def split(self, theta):
        alpha = theta[:self.m]
        beta = theta[self.m:self.m + self.Q]
        phi = np.concatenate([[1.0], theta[self.m + self.Q:]])
        return alpha, beta, phi

    def coefficients(self, theta):
        alpha, beta, phi = self.split(theta)
        return np.vstack([alpha[None, :], np.outer(beta, phi)])

    def derivative(self, theta):
        alpha, beta, phi = self.split(theta)
        rows = self.Q + 1
        T = np.zeros((rows * self.m, self.size))
        for k in range(self.m):
            T[k * rows, k] = 1.0
            for q in range(self.Q):
                T[k * rows + q + 1, self.m + q] = phi[k]
            if k >= 1:
                T[k * rows + 1:(k + 1) * rows, self.m + self.Q + k - 1] = beta
        return T

    def curvature(self, theta, grad_C):
        # d2 C[q+1, k] / d beta_q d phi_k = 1 for the free phi_k
        H = np.zeros((self.size, self.size))
        for k in range(1, self.m):
            j = self.m + self.Q + k - 1
            H[self.m:self.m + self.Q, j] = grad_C[1:, k]
            H[j, self.m:self.m + self.Q] = grad_C[1:, k]
        return H

    def start(self, intercepts):
        theta = super(StereotypeStructure, self).start(intercepts)
        theta[self.m + self.Q:] = np.arange(2, self.m + 1, dtype=float)
        return theta

    def blocks(self):
        linear = np.arange(self.m + self.Q)
        scaling = np.arange(self.m + self.Q, self.size)
        return [linear, scaling] if scaling.size else None

    def unpack(self, theta):
        alpha, beta, phi = self.split(np.asarray(theta, dtype=float))
        return alpha.copy(), beta.reshape(self.Q, 1).copy(), phi

    def pack(self, alpha, B, phi=None):
        phi = np.asarray(phi, dtype=float)
        if phi.size != self.m or phi[0] != 1.0:
            raise SpecificationError('stereotype scaling factors must start with 1')
        return np.concatenate([alpha, np.asarray(B, dtype=float).ravel(), phi[1:]])


def structure_for(spec, Q, K):
    if spec.family == STEREOTYPE:
        return StereotypeStructure(Q, K)
    if spec.proportional:
        return ProportionalStructure(Q, K, spec.relaxed)
    return FreeStructure(Q, K)
