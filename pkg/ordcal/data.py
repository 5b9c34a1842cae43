import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .errors import DatasetError, EmptyCategoryError

logger = logging.getLogger(__name__)


def _frozen(array, dtype):
    array = np.array(array, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Dataset:
    """Predictor matrix plus ordinal outcome labels 1..K."""
    predictors: np.ndarray
    outcomes: np.ndarray
    K: int
    columns: tuple = ()

    def __post_init__(self):
        X = np.asarray(self.predictors, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2:
            raise DatasetError('predictors must be a matrix')
        y = np.asarray(self.outcomes)
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise DatasetError('outcomes must be a vector with one label per row')
        if not np.all(np.isfinite(X)):
            row, col = np.argwhere(~np.isfinite(X))[0]
            raise DatasetError('non-finite predictor value', row=int(row) + 1,
                               column=self._column_name(col, X.shape[1]))
        if y.size and not np.all(np.equal(np.mod(y, 1), 0)):
            raise DatasetError('outcome labels must be integers')
        y = y.astype(int)
        if self.K < 2:
            raise DatasetError('at least two outcome categories are required')
        bad = np.flatnonzero((y < 1) | (y > self.K))
        if bad.size:
            msg = 'outcome label {} outside 1..{}'.format(y[bad[0]], self.K)
            raise DatasetError(msg, row=int(bad[0]) + 1)

        columns = tuple(self.columns) or tuple(
            'x{}'.format(q + 1) for q in range(X.shape[1]))
        if len(columns) != X.shape[1]:
            raise DatasetError('column names do not match the predictor count')

        object.__setattr__(self, 'predictors', _frozen(X, float))
        object.__setattr__(self, 'outcomes', _frozen(y, int))
        object.__setattr__(self, 'K', int(self.K))
        object.__setattr__(self, 'columns', columns)

    def _column_name(self, index, width):
        if self.columns and len(self.columns) == width:
            return self.columns[index]
        return 'x{}'.format(index + 1)

    @property
    def n(self):
        return self.outcomes.shape[0]

    @property
    def Q(self):
        return self.predictors.shape[1]

    def counts(self):
        """Number of cases per category, index 0 for category 1."""
        return np.bincount(self.outcomes - 1, minlength=self.K)

    def missing_categories(self):
        return [k + 1 for k, count in enumerate(self.counts()) if count == 0]

    def require_all_categories(self):
        missing = self.missing_categories()
        if missing:
            raise EmptyCategoryError(missing)

    def take(self, rows):
        return Dataset(self.predictors[rows], self.outcomes[rows], self.K,
                       self.columns)

    def with_outcomes(self, outcomes):
        return Dataset(self.predictors, outcomes, self.K, self.columns)


@dataclass(frozen=True, eq=False)
class ProbMatrix:
    """n x K matrix of estimated risks with a per-row validity flag."""
    values: np.ndarray
    valid: np.ndarray = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[1] < 2:
            raise DatasetError('probabilities must be an n x K matrix, K >= 2')
        if self.valid is None:
            valid = np.all(values >= 0.0, axis=1)
        else:
            valid = np.asarray(self.valid, dtype=bool)
        object.__setattr__(self, 'values', _frozen(values, float))
        object.__setattr__(self, 'valid', _frozen(valid, bool))

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def K(self):
        return self.values.shape[1]

    @property
    def all_valid(self):
        return bool(np.all(self.valid))

    def category(self, k):
        """P(Y = k) for 1-based k."""
        return self.values[:, k - 1]

    def exceedance(self):
        """V[:, k-1] = P(Y >= k), summing columns k..K."""
        return np.cumsum(self.values[:, ::-1], axis=1)[:, ::-1]

    def at_least(self, k):
        return self.exceedance()[:, k - 1]

    def take(self, rows):
        return ProbMatrix(self.values[rows], self.valid[rows])


@dataclass(frozen=True)
class ValidityReport:
    count: int = 0
    rows: tuple = field(default_factory=tuple)

    @classmethod
    def from_mask(cls, mask):
        rows = tuple(int(r) for r in np.flatnonzero(mask))
        return cls(count=len(rows), rows=rows)


def _read_frame(path):
    try:
        return pd.read_csv(path, dtype=str, keep_default_na=False,
                           skipinitialspace=True)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise DatasetError('cannot read "{}": {}'.format(path, exc))


def _numeric(frame, column):
    raw = frame[column].str.strip()
    values = pd.to_numeric(raw, errors='coerce')
    bad = np.flatnonzero(values.isna().to_numpy())
    if bad.size:
        if raw.iloc[bad[0]] == '':
            raise DatasetError('missing value', row=int(bad[0]) + 1, column=column)
        raise DatasetError('non-numeric cell "{}"'.format(raw.iloc[bad[0]]),
                           row=int(bad[0]) + 1, column=column)
    return values.to_numpy(dtype=float)


def load_dataset(path, outcome='y', truth_prefix='truth_', categories=None):
    """Read a CSV with a header row into a Dataset.

    Numeric columns other than the outcome are predictors, except the ones
    named ``<truth_prefix><k>`` which form the true-risk matrix. Returns
    ``(dataset, truth)``; ``truth`` is None when no truth columns exist.
    Rows in error messages count data rows from 1.
    """
    frame = _read_frame(path)

    if outcome not in frame.columns:
        raise DatasetError('outcome column not found', column=outcome)

    truth_columns = []
    if truth_prefix:
        truth_columns = [c for c in frame.columns
                         if c.startswith(truth_prefix) and
                         c[len(truth_prefix):].isdigit()]
        truth_columns.sort(key=lambda c: int(c[len(truth_prefix):]))
    predictor_columns = [c for c in frame.columns
                         if c != outcome and c not in truth_columns]

    numeric = {column: _numeric(frame, column) for column in frame.columns}

    y = numeric[outcome]
    fractional = np.flatnonzero(np.mod(y, 1) != 0)
    if fractional.size:
        raise DatasetError('outcome must be integer-valued',
                           row=int(fractional[0]) + 1, column=outcome)
    below = np.flatnonzero(y < 1)
    if below.size:
        msg = 'outcome label {:g} outside 1..K'.format(y[below[0]])
        raise DatasetError(msg, row=int(below[0]) + 1, column=outcome)

    K = int(y.max()) if y.size else 0
    if categories is not None:
        if K > categories:
            above = np.flatnonzero(y > categories)
            msg = 'outcome label {:g} outside 1..{}'.format(y[above[0]], categories)
            raise DatasetError(msg, row=int(above[0]) + 1, column=outcome)
        K = categories
    if K < 2:
        raise DatasetError('at least two outcome categories are required',
                           column=outcome)

    X = np.column_stack([numeric[c] for c in predictor_columns]) \
        if predictor_columns else np.empty((y.size, 0))
    dataset = Dataset(X, y.astype(int), K, tuple(predictor_columns))

    truth = None
    if truth_columns:
        if len(truth_columns) != K:
            raise DatasetError('expected {} truth columns, found {}'.format(
                K, len(truth_columns)))
        truth = ProbMatrix(np.column_stack([numeric[c] for c in truth_columns]))

    logger.info('Loaded dataset. path="%s" n="%s" Q="%s" K="%s" truth="%s"',
                path, dataset.n, dataset.Q, K, truth is not None)
    return dataset, truth


def load_predictors(path, columns):
    """Read the named predictor columns of a CSV into an n x Q matrix."""
    frame = _read_frame(path)
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise DatasetError('predictor column not found', column=missing[0])
    values = [_numeric(frame, column) for column in columns]
    X = np.column_stack(values) if values else np.empty((len(frame), 0))
    if not np.all(np.isfinite(X)):
        row, col = np.argwhere(~np.isfinite(X))[0]
        raise DatasetError('non-finite predictor value', row=int(row) + 1,
                           column=columns[col])
    return X
