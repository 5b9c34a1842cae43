import pandas as pd

from ordcal.api.serializers import render_json
from ordcal.management.base import OrdcalCommand
from ordcal.utils import write_frame, write_text

from studies.api.serializers import ScenarioSerializer
from studies.scenarios import FORMS, select_scenarios


def scenario_frame(scenarios):
    rows = []
    for scenario in scenarios:
        rows.append({
            'id': scenario.id, 'Q': scenario.Q, 'K': scenario.K,
            'kinds': ' '.join(scenario.kinds),
            'priors': ' '.join('{:.3f}'.format(p) for p in scenario.priors),
            'orc': scenario.orc, 'description': scenario.description,
        })
    return pd.DataFrame(rows, columns=['id', 'Q', 'K', 'kinds', 'priors', 'orc',
                                       'description'])


class Command(OrdcalCommand):
    help = 'Inspect the built-in simulation scenarios'

    def add_command_arguments(self, parser):
        actions = parser.add_subparsers(dest='action', required=True)
        listing = actions.add_parser('list', help='list scenarios with their parameters')
        listing.add_argument('--truth', choices=FORMS, default=None)
        listing.add_argument('--format', choices=('json', 'csv'), default='json')

    def run(self, **options):
        scenarios = select_scenarios(options['truth'])
        if options['format'] == 'csv':
            write_frame(self.output_path(options, 'scenarios.csv'), scenario_frame(scenarios))
        else:
            document = ScenarioSerializer(scenarios, many=True).data
            write_text(self.output_path(options, 'scenarios.json'), render_json(document))
        for scenario in scenarios:
            self.stdout.write('{}\tQ={}\tK={}\tORC={:.2f}\t{}'.format(
                scenario.id, scenario.Q, scenario.K, scenario.orc, scenario.description))
