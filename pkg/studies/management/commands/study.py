from ordcal.families import parse_families
from ordcal.management.base import OrdcalCommand

from studies.reports import write_study
from studies.scenarios import FORMS, select_scenarios
from studies.validation import large_sample_study, small_sample_study

DEFAULT_FAMILIES = 'mlr,cl-po,ac-po,slm'
SUMMARY = ('eci', 'rmspe', 'orc')


def _fmt(value):
    if value is None or value != value:
        return 'n/a'
    return '{:.4f}'.format(value)


class Command(OrdcalCommand):
    help = 'Reproduce the large-sample or small-sample simulation study'
    seeded = True
    threaded = True

    def add_command_arguments(self, parser):
        designs = parser.add_subparsers(dest='design', required=True,
                                        title='study designs')

        large = designs.add_parser('large-sample',
                                   help='apparent performance on one large dataset')
        large.add_argument('--truth', choices=FORMS, default=None,
                           help='truth form (default: both)')
        large.add_argument('--scenario', type=int, action='append', default=None,
                           help='scenario number; repeat for several (default: all)')
        large.add_argument('--n', type=int, default=None,
                           help='cases in the large dataset')

        small = designs.add_parser('small-sample',
                                   help='develop on small datasets, validate on a large one')
        small.add_argument('--truth', choices=FORMS, required=True)
        small.add_argument('--scenario', type=int, required=True)
        small.add_argument('--n-dev', type=int, required=True,
                           help='development sample size, e.g. 100 or 500')
        small.add_argument('--reps', type=int, default=None, help='replicates')
        small.add_argument('--n-eval', type=int, default=None,
                           help='size of the shared evaluation set')

        for sub in (large, small):
            sub.add_argument('--families', default=DEFAULT_FAMILIES,
                             help='comma separated family flags')
            sub.add_argument('--format', choices=('json', 'csv'), default='json',
                             help='csv adds the table next to the full study.json')

    def run(self, **options):
        families = parse_families(options['families'])
        if options['design'] == 'large-sample':
            scenarios = select_scenarios(options['truth'], options['scenario'])
            result = large_sample_study(scenarios, families, n=options['n'],
                                        seed=options['seed'], threads=options['threads'])
        else:
            scenario = select_scenarios(options['truth'], [options['scenario']])[0]
            result = small_sample_study(scenario, families, options['n_dev'],
                                        reps=options['reps'], n_eval=options['n_eval'],
                                        seed=options['seed'], threads=options['threads'])

        for path in write_study(result, options['out'], options['format']):
            self.outputs.append(path)
        for row in result.rows:
            if row.failures:
                self.warnings.append('{} {}: {} failed fits'.format(
                    row.scenario, row.family, row.failures))
            self.stdout.write('{}\t{}\tECI={}\trMSPE={}\tORC={}'.format(
                row.scenario, row.family, *[_fmt(row.measures.get(key)) for key in SUMMARY]))
