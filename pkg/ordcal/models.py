"""Fitted ordinal models and their JSON documents.

There is no database behind this app; ``FittedModel`` is a plain immutable
value object and the JSON document is described by
``ordcal.api.serializers.FittedModelSerializer``.
"""
import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .data import ProbMatrix, ValidityReport
from .errors import DatasetError, ModelFormatError
from .families import CUMULATIVE, link_for, structure_for

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


def category_order(K, reference=1):
    """Internal category order: the reference category first."""
    reference = int(reference)
    return [reference - 1] + [c for c in range(K) if c != reference - 1]


@dataclass(frozen=True, eq=False)
class FittedModel:
    spec: object
    Q: int
    K: int
    columns: tuple
    alpha: np.ndarray
    B: np.ndarray
    phi: np.ndarray = None
    loglik: float = float('nan')
    iterations: int = 0
    converged: bool = False
    tolerance: float = 1e-8
    loglik_trace: tuple = ()
    gradient_norm: float = float('nan')
    warnings: tuple = ()
    reference: int = 1
    n: int = 0

    def __post_init__(self):
        for name in ('alpha', 'B', 'phi'):
            value = getattr(self, name)
            if value is not None:
                value = np.array(value, dtype=float, copy=True)
                value.setflags(write=False)
                object.__setattr__(self, name, value)
        object.__setattr__(self, 'columns', tuple(self.columns))
        object.__setattr__(self, 'loglik_trace', tuple(float(v) for v in self.loglik_trace))
        object.__setattr__(self, 'warnings', tuple(self.warnings))

    @property
    def structure(self):
        return structure_for(self.spec, self.Q, self.K)

    @property
    def link(self):
        return link_for(self.spec, self.K)

    @property
    def order(self):
        return category_order(self.K, self.reference)

    def param_vector(self):
        return self.structure.pack(self.alpha, self.B, self.phi)

    def coefficient_matrix(self):
        """(Q+1) x (K-1) matrix with the intercepts in the first row."""
        m = self.K - 1
        B = np.asarray(self.B, dtype=float)
        if self.phi is not None:
            B = B.reshape(self.Q, 1) * self.phi.reshape(1, m)
        elif B.shape[1] == 1:
            B = np.repeat(B, m, axis=1)
        return np.vstack([self.alpha.reshape(1, m), B])

    def encode(self, outcomes):
        """0-based internal category codes for labels 1..K."""
        codes = np.empty(self.K, dtype=int)
        codes[self.order] = np.arange(self.K)
        return codes[np.asarray(outcomes, dtype=int) - 1]

    def check_predictors(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(1, -1) if self.Q > 1 else X.reshape(-1, 1)
        if X.shape[1] != self.Q:
            msg = 'model expects {} predictor columns, got {}'
            raise DatasetError(msg.format(self.Q, X.shape[1]))
        return X

    def linear_predictors(self, X):
        X = self.check_predictors(X)
        C = self.coefficient_matrix()
        return C[0][None, :] + X @ C[1:]

    def predict(self, X):
        eta = self.linear_predictors(X)
        internal = self.link.probabilities(eta)
        values = np.empty_like(internal)
        values[:, self.order] = internal
        return ProbMatrix(values)

    def validity(self, X):
        if self.spec.family != CUMULATIVE or self.spec.proportional:
            return ValidityReport()
        eta = self.linear_predictors(X)
        return ValidityReport.from_mask(np.any(np.diff(eta, axis=1) > 0, axis=1))

    def intercept_ordering(self):
        """For cumulative models: are the P(Y >= k) intercepts decreasing?"""
        if self.spec.family != CUMULATIVE:
            return None
        return bool(np.all(np.diff(self.alpha) < 0))


@dataclass(frozen=True)
class Solution:
    """Raw optimizer output for one likelihood."""
    theta: np.ndarray
    loglik: float
    iterations: int
    converged: bool
    trace: tuple
    gradient_norm: float
    eta_max: float
    warnings: tuple = field(default_factory=tuple)


def model_to_document(model):
    from .api.serializers import FittedModelSerializer
    return FittedModelSerializer(model).data


def model_from_document(document):
    from .api.serializers import FittedModelSerializer
    serializer = FittedModelSerializer(data=document)
    if not serializer.is_valid():
        raise ModelFormatError(json.dumps(serializer.errors, sort_keys=True))
    return serializer.save()


def save_model(model, path):
    from .api.serializers import render_json
    from .utils import write_text
    write_text(path, render_json(model_to_document(model)))
    logger.info('Saved model. path="%s" family="%s"', path, model.spec.flag)


def load_model(path):
    try:
        with open(path, encoding='utf-8') as handle:
            document = json.load(handle)
    except (OSError, ValueError) as exc:
        raise ModelFormatError('cannot read "{}": {}'.format(path, exc))
    model = model_from_document(document)
    logger.info('Loaded model. path="%s" family="%s"', path, model.spec.flag)
    return model
