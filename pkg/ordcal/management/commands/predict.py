import pandas as pd

from ordcal.data import load_predictors
from ordcal.management.base import OrdcalCommand
from ordcal.models import load_model
from ordcal.utils import write_frame


class Command(OrdcalCommand):
    help = 'Estimated risks and linear predictors of a saved model for a CSV of predictors'

    def add_command_arguments(self, parser):
        parser.add_argument('--model', required=True, help='model.json written by fit')
        parser.add_argument('--data', required=True,
                            help='CSV holding the predictor columns the model was fit on')

    def run(self, **options):
        model = load_model(self.use_input(options['model']))
        X = load_predictors(self.use_input(options['data']), model.columns)
        probs = model.predict(X)
        lp = model.linear_predictors(X)

        frame = pd.DataFrame(lp, columns=['lp_{}'.format(j + 1) for j in range(model.K - 1)])
        for k in range(1, model.K + 1):
            frame['p_{}'.format(k)] = probs.category(k)
        frame['valid'] = probs.valid.astype(int)
        write_frame(self.output_path(options, 'predictions.csv'), frame)

        invalid = int((~probs.valid).sum())
        if invalid:
            message = '{} rows have negative estimated risks'.format(invalid)
            self.warnings.append(message)
            self.stderr.write('warning: {}'.format(message))
        self.stdout.write('predicted {} rows'.format(probs.n))
