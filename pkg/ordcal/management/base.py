import argparse
import logging
import os
import sys

from django.core.management.base import BaseCommand, CommandError, CommandParser

from ..errors import NumericalError
from ..manifest import write_manifest
from ..utils import default_seed, default_threads

logger = logging.getLogger(__name__)

USER_ERROR = 1
NUMERICAL_ERROR = 2


class ArgumentErrorParser(CommandParser):
    """A bad or missing argument is a user error, exit code 1."""

    def error(self, message):
        if self.called_from_command_line:
            self.print_usage(sys.stderr)
            self.exit(USER_ERROR, '{}: error: {}\n'.format(self.prog, message))
        raise CommandError('Error: {}'.format(message), returncode=USER_ERROR)


def _parsers(parser):
    yield parser
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for subparser in action.choices.values():
                yield from _parsers(subparser)


class OrdcalCommand(BaseCommand):
    """Base for every ordcal/studies command.

    Subclasses implement ``add_command_arguments`` and ``run``. User errors
    (``ValueError``) leave with exit code 1, numerical failures with 2.
    """
    seeded = False
    threaded = False

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super(OrdcalCommand, self).create_parser(prog_name, subcommand, **kwargs)
        for each in _parsers(parser):
            each.__class__ = ArgumentErrorParser
            each.called_from_command_line = parser.called_from_command_line
        return parser

    def add_arguments(self, parser):
        parser.add_argument(
            '--out', default='.',
            help='directory receiving the outputs and manifest.json'
        )
        if self.seeded:
            parser.add_argument(
                '--seed', type=int, default=None,
                help='random seed (default: $ORDCAL_SEED, then settings)'
            )
        if self.threaded:
            parser.add_argument(
                '--threads', type=int, default=None,
                help='worker threads (default: $ORDCAL_THREADS or the core count)'
            )
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def handle(self, *args, **options):
        self.outputs = []
        self.inputs = []
        self.warnings = []
        try:
            os.makedirs(options['out'], exist_ok=True)
        except OSError as exc:
            raise CommandError('cannot create "{}": {}'.format(options['out'], exc),
                               returncode=USER_ERROR)
        seed = None
        if self.seeded:
            seed = options['seed'] if options.get('seed') is not None else default_seed()
            options['seed'] = seed
        if self.threaded and not options.get('threads'):
            options['threads'] = default_threads()
        try:
            self.run(**options)
        except NumericalError as exc:
            logger.error('Numerical failure. command="%s" error="%s"', self.name, exc)
            raise CommandError(str(exc), returncode=NUMERICAL_ERROR)
        except ValueError as exc:
            raise CommandError(str(exc), returncode=USER_ERROR)
        write_manifest(options['out'], self.name, options, seed=seed,
                       inputs=self.inputs, outputs=self.outputs, warnings=self.warnings)

    @property
    def name(self):
        return self.__module__.rsplit('.', 1)[-1]

    def run(self, **options):
        raise NotImplementedError

    def output_path(self, options, filename):
        path = os.path.join(options['out'], filename)
        self.outputs.append(path)
        return path

    def use_input(self, path):
        if not os.path.isfile(path):
            raise CommandError('input file "{}" does not exist'.format(path),
                               returncode=USER_ERROR)
        self.inputs.append(path)
        return path
