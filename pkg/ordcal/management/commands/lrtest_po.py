import pandas as pd

from ordcal.api.serializers import LRTestResultSerializer, render_json
from ordcal.data import load_dataset
from ordcal.errors import LRTestError
from ordcal.families import CUMULATIVE, ModelSpec
from ordcal.fitting import FitOptions, fit, lr_test_proportionality, require_converged
from ordcal.management.base import OrdcalCommand
from ordcal.utils import write_frame, write_text


class Command(OrdcalCommand):
    help = 'Per-predictor likelihood ratio test of the proportional odds assumption'

    def add_command_arguments(self, parser):
        parser.add_argument('--data', required=True, help='CSV dataset')
        parser.add_argument('--outcome', default='y', help='name of the outcome column')
        parser.add_argument('--format', choices=('json', 'csv'), default='json')

    def run(self, **options):
        data, _ = load_dataset(self.use_input(options['data']), outcome=options['outcome'])
        fit_options = FitOptions()
        proportional = require_converged(fit(data, ModelSpec(CUMULATIVE, True), fit_options))

        results = []
        for q, name in enumerate(data.columns):
            try:
                results.append(lr_test_proportionality(data, q, fit_options, proportional))
            except LRTestError as exc:
                self.warnings.append(str(exc))
                self.stderr.write('warning: {}'.format(exc))
        if not results:
            raise LRTestError('every predictor', 'no relaxed model could be fit')

        rows = LRTestResultSerializer(results, many=True).data
        if options['format'] == 'csv':
            write_frame(self.output_path(options, 'lrtest_po.csv'), pd.DataFrame(rows))
        else:
            write_text(self.output_path(options, 'lrtest_po.json'), render_json(rows))
        for result in results:
            self.stdout.write('{}\tchi2={:.3f}\tdf={}\tp={:.4g}'.format(
                result.predictor, result.statistic, result.df, result.p_value))
