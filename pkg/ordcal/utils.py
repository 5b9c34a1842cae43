import contextlib
import hashlib
import logging
import os
import tempfile

import numpy as np
from scipy import special

from .conf import settings

logger = logging.getLogger(__name__)


def clip_probabilities(values, epsilon=None):
    """Clip probabilities into [eps, 1 - eps] ahead of any logit."""
    if epsilon is None:
        epsilon = settings.ORDCAL_CLIP_EPSILON
    return np.clip(np.asarray(values, dtype=float), epsilon, 1.0 - epsilon)


def clipped_logit(values, epsilon=None):
    return special.logit(clip_probabilities(values, epsilon))


def clipped_log(values, epsilon=None):
    return np.log(clip_probabilities(values, epsilon))


def default_seed():
    """ORDCAL_SEED from the environment, falling back to settings."""
    value = os.environ.get('ORDCAL_SEED')
    if value is None or value == '':
        return int(settings.ORDCAL_SEED)
    try:
        return int(value)
    except ValueError:
        raise ValueError('ORDCAL_SEED must be an integer, got "{}"'.format(value))


def default_threads():
    value = os.environ.get('ORDCAL_THREADS')
    if value:
        return max(1, int(value))
    return max(1, int(getattr(settings, 'ORDCAL_THREADS', 1) or 1))


def file_digest(path, chunk_size=1 << 20):
    """sha256 hex digest of a file."""
    digest = hashlib.sha256()
    with open(path, 'rb') as handle:
        for chunk in iter(lambda: handle.read(chunk_size), b''):
            digest.update(chunk)
    return digest.hexdigest()


@contextlib.contextmanager
def atomic_write(path, mode='w'):
    """Write to a temporary file next to ``path`` and rename it into place.

    A reader never sees a partially written file: either the old content
    or the complete new one.
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, temp_path = tempfile.mkstemp(
        dir=directory, prefix='.{}.'.format(os.path.basename(path)), suffix='.tmp'
    )
    try:
        encoding = None if 'b' in mode else 'utf-8'
        newline = None if 'b' in mode else ''
        with os.fdopen(fd, mode, encoding=encoding, newline=newline) as handle:
            yield handle
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(temp_path, path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(temp_path)
        raise
    logger.debug('Wrote file. path="%s"', path)


def write_text(path, text):
    with atomic_write(path) as handle:
        handle.write(text)


def write_frame(path, frame, sep=','):
    """Write a pandas DataFrame atomically with full float precision."""
    with atomic_write(path) as handle:
        frame.to_csv(handle, sep=sep, index=False, float_format='%.17g')
