from ordcal.management.base import OrdcalCommand

from studies.scenarios import FORMS, get_scenario
from studies.simulation import export_simulated, generate


class Command(OrdcalCommand):
    help = 'Simulate a dataset with true risks under a built-in scenario'
    seeded = True

    def add_command_arguments(self, parser):
        parser.add_argument('--truth', required=True, choices=FORMS,
                            help='form of the data generating model')
        parser.add_argument('--scenario', required=True, type=int,
                            help='scenario number within the truth form')
        parser.add_argument('--n', type=int, required=True, help='number of cases')
        parser.add_argument('--name', default='data',
                            help='base name of the CSV and its .json sidecar')

    def run(self, **options):
        scenario = get_scenario(options['truth'], options['scenario'])
        simulated = generate(scenario, options['n'], options['seed'])
        csv_path, sidecar = export_simulated(
            simulated, self.output_path(options, '{}.csv'.format(options['name'])))
        self.outputs.append(sidecar)

        missing = simulated.dataset.missing_categories()
        if missing:
            message = 'categories {} do not occur in the simulated data'.format(missing)
            self.warnings.append(message)
            self.stderr.write('warning: {}'.format(message))
        self.stdout.write('{}: n={} counts={}'.format(
            scenario.id, simulated.dataset.n, simulated.dataset.counts().tolist()))
