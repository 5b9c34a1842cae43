import logging
from itertools import combinations

import numpy as np
from scipy import stats

from .errors import DatasetError

logger = logging.getLogger(__name__)


def expected_outcome_score(probs):
    """sum_k k * P(Y = k) per case."""
    return probs.values @ np.arange(1, probs.K + 1, dtype=float)


def c_statistic(scores, events):
    """Binary C statistic by mid-ranks; ties count one half."""
    scores = np.asarray(scores, dtype=float)
    events = np.asarray(events, dtype=bool)
    n1 = int(events.sum())
    n0 = events.size - n1
    if n0 == 0 or n1 == 0:
        raise DatasetError('the C statistic needs both events and non-events')
    ranks = stats.rankdata(scores)
    return (ranks[events].sum() - n1 * (n1 + 1) / 2.0) / (n0 * n1)


def pairwise_c(probs, y):
    """{(k, l): C statistic of category l against k} for the present pairs."""
    y = np.asarray(y, dtype=int)
    if probs.n != y.size:
        raise DatasetError('probabilities and outcomes differ in length')
    scores = expected_outcome_score(probs)
    present = set(np.unique(y).tolist())
    result = {}
    for k, l in combinations(range(1, probs.K + 1), 2):
        if k not in present or l not in present:
            logger.warning('Category pair skipped, category absent. pair="%s,%s"', k, l)
            continue
        rows = (y == k) | (y == l)
        result[(k, l)] = c_statistic(scores[rows], y[rows] == l)
    return result


def orc(probs, y):
    """Ordinal C statistic: unweighted mean of the pairwise C statistics.

    Rows flagged invalid (negative risks from a cumulative non-proportional
    fit) are still ranked by their expected outcome, with a warning.
    """
    if not probs.all_valid:
        logger.warning('Ordinal C computed on invalid risk rows. invalid="%s" n="%s"',
                       int(np.sum(~probs.valid)), probs.n)
    pairs = pairwise_c(probs, y)
    if not pairs:
        raise DatasetError('the ordinal C statistic needs at least two categories present')
    return float(np.mean(list(pairs.values())))


def rmspe(estimated, truth):
    """Root mean squared difference between estimated and true risks."""
    if estimated.values.shape != truth.values.shape:
        raise DatasetError('estimated {} and true {} risk matrices differ in shape'.format(
            estimated.values.shape, truth.values.shape))
    return float(np.sqrt(np.mean((estimated.values - truth.values) ** 2)))
