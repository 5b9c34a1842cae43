import pandas as pd

from ordcal.api.serializers import CalibrationReportSerializer, render_json
from ordcal.calibration import (CATEGORY, DICHOTOMY, SETUPS, calibration_curve_data,
                                calibration_report, write_plot_data)
from ordcal.data import load_dataset
from ordcal.management.base import OrdcalCommand
from ordcal.models import load_model
from ordcal.utils import write_frame, write_text

PLOT_MODES = {
    'category': (CATEGORY,),
    'dichotomy': (DICHOTOMY,),
    'both': (CATEGORY, DICHOTOMY),
    'none': (),
}


def report_frames(report):
    """Tabular mirror of a calibration report: one row per target, one of metrics."""
    rows = []
    for result in report.categories + report.dichotomies + report.model_specific:
        rows.append({'kind': result.target.kind, 'target': result.target.label,
                     'intercept': result.intercept, 'slope': result.slope,
                     'converged': int(result.converged)})
    metrics = pd.DataFrame([{
        'family': report.family, 'n': report.n, 'setup': report.setup,
        'eci_original': report.eci_original, 'eci_rescaled': report.eci_rescaled,
        'orc': report.orc,
        'rmspe': report.rmspe if report.rmspe is not None else float('nan'),
        'invalid_rows': report.invalid_rows,
    }])
    return pd.DataFrame(rows), metrics


class Command(OrdcalCommand):
    help = 'Calibration report (weak, model-specific, flexible) of a saved model on a dataset'

    def add_command_arguments(self, parser):
        parser.add_argument('--model', required=True, help='model.json written by fit')
        parser.add_argument('--data', required=True,
                            help='CSV dataset; truth_<k> columns enable rMSPE')
        parser.add_argument('--outcome', default='y', help='name of the outcome column')
        parser.add_argument('--setup', choices=sorted(SETUPS), default='mlr-reference',
                            help='flexible recalibration model')
        parser.add_argument('--df', type=int, default=None,
                            help='spline degrees of freedom per transformed predictor')
        parser.add_argument('--plots', choices=sorted(PLOT_MODES), default='both',
                            help='calibration plot data to write')
        parser.add_argument('--format', choices=('json', 'csv'), default='json')

    def run(self, **options):
        model = load_model(self.use_input(options['model']))
        data, truth = load_dataset(self.use_input(options['data']),
                                   outcome=options['outcome'], categories=model.K)
        report = calibration_report(model, data, truth, options['setup'], options['df'])
        self.warnings.extend(report.warnings)

        if options['format'] == 'csv':
            targets, metrics = report_frames(report)
            write_frame(self.output_path(options, 'calibration.csv'), targets)
            write_frame(self.output_path(options, 'metrics.csv'), metrics)
        else:
            document = CalibrationReportSerializer(report).data
            write_text(self.output_path(options, 'calibration.json'), render_json(document))

        if report.recalibration is not None:
            probs = model.predict(data.predictors)
            for mode in PLOT_MODES[options['plots']]:
                curves = calibration_curve_data(probs, report.recalibration, mode)
                self.outputs.append(write_plot_data(curves, options['out'], mode))

        for result in report.model_specific:
            self.stdout.write('{}\tintercept={:.4f}\tslope={:.4f}'.format(
                result.target, result.intercept, result.slope))
        self.stdout.write('ECI={:.4f} (rescaled) ORC={:.4f}'.format(
            report.eci_rescaled, report.orc))
