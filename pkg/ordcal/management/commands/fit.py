from django.core.management.base import CommandError

from ordcal.data import load_dataset
from ordcal.families import FAMILY_FLAGS, ModelSpec
from ordcal.fitting import FitOptions, events_per_parameter, fit
from ordcal.management.base import USER_ERROR, OrdcalCommand
from ordcal.models import save_model


class Command(OrdcalCommand):
    help = 'Fit an ordinal model family to a CSV dataset and save it as model.json'

    def add_command_arguments(self, parser):
        parser.add_argument('--data', required=True,
                            help='CSV with a header row and an outcome column')
        parser.add_argument('--family', required=True, choices=sorted(FAMILY_FLAGS),
                            help='model family')
        parser.add_argument('--outcome', default='y',
                            help='name of the outcome column (labels 1..K)')
        parser.add_argument('--reference', type=int, default=1,
                            help='reference category of the multinomial model')
        parser.add_argument('--tolerance', type=float, default=None,
                            help='relative log-likelihood change for convergence')
        parser.add_argument('--max-iter', type=int, default=None,
                            help='maximum Newton iterations')

    def run(self, **options):
        data, _ = load_dataset(self.use_input(options['data']), outcome=options['outcome'])
        spec = ModelSpec.from_flag(options['family'])
        if options['reference'] != 1 and options['family'] != 'mlr':
            raise CommandError('--reference applies to --family mlr only',
                               returncode=USER_ERROR)
        fit_options = FitOptions(tolerance=options['tolerance'],
                                 max_iter=options['max_iter'],
                                 reference=options['reference'])
        model = fit(data, spec, fit_options)
        save_model(model, self.output_path(options, 'model.json'))
        self.warnings.extend(model.warnings)

        epp = events_per_parameter(data, spec)
        self.stdout.write('family={} n={} K={} Q={} loglik={:.6f} iterations={} '
                          'converged={} epp={:.2f}'.format(
                              spec.flag, data.n, data.K, data.Q, model.loglik,
                              model.iterations, model.converged, epp))
        for message in model.warnings:
            self.stderr.write('warning: {}'.format(message))
