import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.interpolate import BSpline
from statsmodels.nonparametric.smoothers_lowess import lowess

from .conf import settings
from .errors import DegenerateBasisError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SplineBasis:
    """Regression B-spline basis without its first column.

    ``df`` columns: cubic pieces with ``df - 3`` interior knots placed at
    quantiles of the data, or a single polynomial piece of degree ``df``
    when ``df <= 3``.
    """
    knots: np.ndarray
    degree: int
    df: int

    def transform(self, x):
        x = np.clip(np.asarray(x, dtype=float), self.knots[0], self.knots[-1])
        design = BSpline.design_matrix(x, self.knots, self.degree).toarray()
        return design[:, 1:]


def _knots(x, df):
    degree = min(3, df)
    interior = df - degree
    lo, hi = float(np.min(x)), float(np.max(x))
    levels = np.linspace(0.0, 1.0, interior + 2)[1:-1]
    inner = np.quantile(x, levels) if interior else np.empty(0)
    knots = np.concatenate([np.repeat(lo, degree + 1), inner, np.repeat(hi, degree + 1)])
    return knots, degree, inner, lo, hi


def spline_basis(x, df=None, name='predictor'):
    """Fit a ``SplineBasis`` to ``x``; returns ``(basis, warnings)``.

    Reduces ``df`` with a warning when there are not enough distinct values
    for the requested knots.
    """
    df = settings.ORDCAL_SPLINE_DF if df is None else int(df)
    if df < 1:
        raise ValueError('spline df must be at least 1')
    x = np.asarray(x, dtype=float)
    distinct = np.unique(x)
    if distinct.size < 2 or distinct[-1] - distinct[0] <= 0:
        raise DegenerateBasisError(name)

    warnings = []
    requested = df
    while df >= 1:
        knots, degree, inner, lo, hi = _knots(x, df)
        well_placed = (inner.size == np.unique(inner).size and
                       np.all(inner > lo) and np.all(inner < hi))
        if distinct.size > df and well_placed:
            break
        df -= 1
    if df < 1:
        raise DegenerateBasisError(name)
    if df != requested:
        message = 'reduced spline df for {} from {} to {} ({} distinct values)'.format(
            name, requested, df, distinct.size)
        warnings.append(message)
        logger.warning('Spline basis reduced. predictor="%s" requested="%s" used="%s"',
                       name, requested, df)
    return SplineBasis(knots=knots, degree=degree, df=df), warnings


def independent_columns(design, tolerance=None):
    """Indices of a maximal linearly independent subset of the columns of
    ``design``, given that an intercept is always fitted alongside.

    Columns are centred (projecting out the intercept) and ranked by a
    column-pivoted QR; a column is aliased when its pivot falls below
    ``tolerance`` times the largest one.
    """
    tolerance = settings.ORDCAL_ALIAS_TOLERANCE if tolerance is None else tolerance
    design = np.asarray(design, dtype=float)
    if design.shape[1] == 0:
        return np.arange(0)
    centred = design - design.mean(axis=0)
    _, R, pivots = linalg.qr(centred, mode='economic', pivoting=True)
    diagonal = np.abs(np.diag(R))
    if diagonal.size == 0 or diagonal[0] == 0:
        return np.arange(0)
    rank = int(np.sum(diagonal > tolerance * diagonal[0]))
    return np.sort(pivots[:rank])


def smooth_curve(estimated, observed, points=None, span=None):
    """Local linear (tricube, span 0.75) curve through a scatter, sampled on
    an even grid between the smallest and largest estimate."""
    points = settings.ORDCAL_CURVE_POINTS if points is None else points
    span = settings.ORDCAL_CURVE_SPAN if span is None else span
    estimated = np.asarray(estimated, dtype=float)
    observed = np.asarray(observed, dtype=float)
    grid = np.linspace(estimated.min(), estimated.max(), points)
    if np.ptp(estimated) == 0:
        return grid, np.full(points, observed.mean())
    curve = lowess(observed, estimated, frac=span, it=0, xvals=grid)
    return grid, np.clip(curve, 0.0, 1.0)
