from ordcal.api.serializers import render_json
from ordcal.data import load_dataset
from ordcal.families import parse_families
from ordcal.management.base import OrdcalCommand
from ordcal.utils import write_frame, write_text

from studies.api.serializers import BootstrapResultSerializer
from studies.reports import bootstrap_frame
from studies.validation import bootstrap_correct


class Command(OrdcalCommand):
    help = 'Optimism-corrected calibration and discrimination by bootstrap resampling'
    seeded = True
    threaded = True

    def add_command_arguments(self, parser):
        parser.add_argument('--data', required=True, help='CSV development dataset')
        parser.add_argument('--family', required=True,
                            help='model family flag, or a comma separated list')
        parser.add_argument('--B', dest='samples', type=int, default=None,
                            help='bootstrap resamples (0 reports the apparent values)')
        parser.add_argument('--outcome', default='y', help='name of the outcome column')
        parser.add_argument('--format', choices=('json', 'csv'), default='json')

    def run(self, **options):
        if options['samples'] is not None and options['samples'] < 0:
            raise ValueError('--B must be zero or positive')
        data, _ = load_dataset(self.use_input(options['data']), outcome=options['outcome'])
        data.require_all_categories()

        results = []
        for spec in parse_families(options['family']):
            result = bootstrap_correct(data, spec, B=options['samples'], seed=options['seed'],
                                       threads=options['threads'])
            self.warnings.extend('{}: {}'.format(spec.flag, m) for m in result.messages)
            results.append(result)

        for result in results:
            if options['format'] == 'csv':
                frame = bootstrap_frame(result)
                path = self.output_path(options, 'bootstrap_{}.csv'.format(result.family))
                write_frame(path, frame)
            self.stdout.write('{}: B={} successes={} failures={} redraws={}'.format(
                result.family, result.samples, result.successes, result.failures,
                result.redraws))
            for measure in sorted(result.apparent):
                if measure.startswith('lp_') or measure == 'orc':
                    self.stdout.write('  {}\tapparent={:.4f}\tcorrected={:.4f}'.format(
                        measure, result.apparent[measure], result.corrected[measure]))

        document = BootstrapResultSerializer(results, many=True).data
        write_text(self.output_path(options, 'bootstrap.json'), render_json(document))
