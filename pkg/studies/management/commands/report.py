from ordcal.api.serializers import render_json
from ordcal.management.base import OrdcalCommand
from ordcal.utils import write_frame, write_text

from studies.reports import load_study, study_frame


class Command(OrdcalCommand):
    help = 'Tabulate a saved study.json, one row per scenario and family'

    def add_command_arguments(self, parser):
        parser.add_argument('--study', required=True, help='study.json written by study')
        parser.add_argument('--format', choices=('json', 'csv'), default='json')

    def run(self, **options):
        result = load_study(self.use_input(options['study']))
        frame = study_frame(result)
        if options['format'] == 'csv':
            write_frame(self.output_path(options, 'table.csv'), frame)
        else:
            records = frame.astype(object).where(frame.notna(), None).to_dict('records')
            write_text(self.output_path(options, 'table.json'), render_json(records))
        self.stdout.write('{} study: {} rows over {} scenarios'.format(
            result.kind, len(frame), frame['scenario'].nunique()))
