"""Run manifests written next to every command output."""
import logging
import os

from django.utils.timezone import now

from . import __version__
from .utils import file_digest, write_text

logger = logging.getLogger(__name__)

GENERATOR = 'numpy.random.Philox'
MANIFEST_NAME = 'manifest.json'

# argparse options every Django command carries; they do not affect results
DJANGO_OPTIONS = ('verbosity', 'settings', 'pythonpath', 'traceback', 'no_color',
                  'force_color', 'skip_checks', 'stdout', 'stderr')


def clean_arguments(options):
    arguments = {}
    for key, value in sorted(options.items()):
        if key in DJANGO_OPTIONS:
            continue
        if value is None or isinstance(value, (bool, int, float, str)):
            arguments[key] = value
        elif isinstance(value, (list, tuple)):
            arguments[key] = [v if isinstance(v, (bool, int, float, str)) else str(v)
                              for v in value]
        else:
            arguments[key] = str(value)
    return arguments


def build_manifest(command, options, seed=None, inputs=(), outputs=(), warnings=()):
    return {
        'command': command,
        'arguments': clean_arguments(options),
        'seed': seed,
        'generator': GENERATOR,
        'version': __version__,
        'inputs': {path: file_digest(path) for path in inputs},
        'outputs': {os.path.basename(path): file_digest(path) for path in outputs},
        'created': now(),
        'warnings': list(warnings),
    }


def write_manifest(directory, command, options, seed=None, inputs=(), outputs=(),
                   warnings=()):
    from .api.serializers import RunManifestSerializer, render_json
    manifest = build_manifest(command, options, seed, inputs, outputs, warnings)
    serializer = RunManifestSerializer(data=manifest)
    serializer.is_valid(raise_exception=True)
    path = os.path.join(directory, MANIFEST_NAME)
    write_text(path, render_json(RunManifestSerializer(manifest).data))
    logger.info('Wrote run manifest. command="%s" path="%s" outputs="%s"',
                command, path, len(manifest['outputs']))
    return path
