import json
import os
from io import StringIO

import pandas as pd
import pytest
from django.core.management import call_command
from django.core.management.base import CommandError


def run(*args):
    stdout, stderr = StringIO(), StringIO()
    call_command(*args, stdout=stdout, stderr=stderr)
    return stdout.getvalue()


def read_json(path):
    with open(path) as handle:
        return json.load(handle)


@pytest.fixture
def simulated_csv(tmp_path):
    out = str(tmp_path / 'simulate')
    run('simulate', '--truth', 'mlr', '--scenario', '1', '--n', '300', '--seed', '5',
        '--out', out)
    return os.path.join(out, 'data.csv')


class TestSimulateCommand(object):

    def test_outputs(self, simulated_csv, tmp_path):
        frame = pd.read_csv(simulated_csv)
        assert list(frame.columns) == ['x1', 'x2', 'x3', 'x4', 'y',
                                       'truth_1', 'truth_2', 'truth_3']
        assert len(frame) == 300
        sidecar = read_json(simulated_csv[:-4] + '.json')
        assert sidecar['scenario'] == 'mlr-1'
        assert sidecar['seed'] == 5
        manifest = read_json(str(tmp_path / 'simulate' / 'manifest.json'))
        assert manifest['command'] == 'simulate'
        assert manifest['seed'] == 5

    def test_same_seed_same_file(self, simulated_csv, tmp_path):
        out = str(tmp_path / 'again')
        run('simulate', '--truth', 'mlr', '--scenario', '1', '--n', '300', '--seed', '5',
            '--out', out)
        with open(simulated_csv) as first, open(os.path.join(out, 'data.csv')) as second:
            assert first.read() == second.read()

    def test_feeds_fit_and_calibrate(self, simulated_csv, tmp_path):
        fit_out = str(tmp_path / 'fit')
        cal_out = str(tmp_path / 'calibrate')
        run('fit', '--data', simulated_csv, '--family', 'cl-po', '--out', fit_out)
        run('calibrate', '--model', os.path.join(fit_out, 'model.json'),
            '--data', simulated_csv, '--plots', 'none', '--out', cal_out)
        report = read_json(os.path.join(cal_out, 'calibration.json'))
        for result in report['model_specific']:
            assert result['slope'] == pytest.approx(1.0, abs=1e-3)
        assert report['rmspe'] is not None

    def test_unknown_scenario(self, tmp_path):
        with pytest.raises(CommandError) as excinfo:
            run('simulate', '--truth', 'clpo', '--scenario', '12', '--n', '10',
                '--out', str(tmp_path))
        assert excinfo.value.returncode == 1


class TestStudyCommand(object):

    def test_large_sample(self, tmp_path):
        out = str(tmp_path)
        output = run('study', '--out', out, '--seed', '1', '--threads', '1', 'large-sample',
                     '--truth', 'mlr', '--scenario', '1', '--n', '3000',
                     '--families', 'mlr,cl-po', '--format', 'csv')
        assert output.count('mlr-1') == 2
        assert 'ORC=' in output
        document = read_json(os.path.join(out, 'study.json'))
        assert document['kind'] == 'large-sample'
        assert [row['family'] for row in document['rows']] == ['mlr', 'cl-po']
        table = pd.read_csv(os.path.join(out, 'study.csv'))
        assert table.columns[0] == 'scenario'
        assert 'lp_2_slope' in table.columns
        manifest = read_json(os.path.join(out, 'manifest.json'))
        assert manifest['seed'] == 1

    def test_small_sample_json(self, tmp_path):
        out = str(tmp_path)
        output = run('study', '--out', out, '--seed', '7', '--threads', '2', 'small-sample',
                     '--truth', 'clpo', '--scenario', '1', '--n-dev', '150', '--reps', '2',
                     '--n-eval', '2000', '--families', 'cl-po')
        assert 'ECI=n/a' in output
        document = read_json(os.path.join(out, 'study.json'))
        assert document['parameters']['reps'] == 2
        assert len(document['replicates']['clpo-1']) == 2
        assert not os.path.exists(os.path.join(out, 'study.csv'))

    def test_unknown_family(self, tmp_path):
        with pytest.raises(CommandError) as excinfo:
            run('study', '--out', str(tmp_path), 'large-sample', '--truth', 'mlr',
                '--scenario', '1', '--n', '500', '--families', 'mlr,probit')
        assert excinfo.value.returncode == 1
        assert not os.path.exists(str(tmp_path / 'manifest.json'))

    def test_numbers_need_truth(self, tmp_path):
        with pytest.raises(CommandError) as excinfo:
            run('study', '--out', str(tmp_path), 'large-sample', '--scenario', '1',
                '--n', '500')
        assert excinfo.value.returncode == 1

    def test_bad_design_option_from_the_command_line(self, tmp_path, capsys):
        from django.core.management import ManagementUtility
        with pytest.raises(SystemExit) as excinfo:
            ManagementUtility(['manage.py', 'study', '--out', str(tmp_path), 'large-sample',
                               '--truth', 'probit']).execute()
        assert excinfo.value.code == 1
        assert 'invalid choice' in capsys.readouterr().err

    def test_missing_design_from_the_command_line(self, tmp_path):
        from django.core.management import ManagementUtility
        with pytest.raises(SystemExit) as excinfo:
            ManagementUtility(['manage.py', 'study', '--out', str(tmp_path)]).execute()
        assert excinfo.value.code == 1


class TestScenariosCommand(object):

    def test_json(self, tmp_path):
        output = run('scenarios', '--out', str(tmp_path), 'list')
        scenarios = read_json(str(tmp_path / 'scenarios.json'))
        assert len(scenarios) == 20
        assert 'clpo-9' in output

    def test_csv_one_form(self, tmp_path):
        run('scenarios', '--out', str(tmp_path), 'list', '--truth', 'clpo', '--format', 'csv')
        frame = pd.read_csv(str(tmp_path / 'scenarios.csv'))
        assert list(frame.columns) == ['id', 'Q', 'K', 'kinds', 'priors', 'orc',
                                       'description']
        assert len(frame) == 9
        assert frame['id'].str.startswith('clpo-').all()


class TestBootstrapCommand(object):

    def test_zero_resamples(self, simulated_csv, tmp_path):
        out = str(tmp_path / 'boot')
        output = run('bootstrap', '--data', simulated_csv, '--family', 'mlr,cl-po',
                     '--B', '0', '--out', out)
        assert 'B=0' in output
        results = read_json(os.path.join(out, 'bootstrap.json'))
        assert [result['family'] for result in results] == ['mlr', 'cl-po']
        for result in results:
            assert result['corrected'] == result['apparent']

    def test_csv(self, simulated_csv, tmp_path):
        out = str(tmp_path / 'boot')
        run('bootstrap', '--data', simulated_csv, '--family', 'cl-po', '--B', '3',
            '--seed', '2', '--threads', '1', '--format', 'csv', '--out', out)
        frame = pd.read_csv(os.path.join(out, 'bootstrap_cl-po.csv'))
        assert 'orc' in frame['measure'].tolist()
        result = read_json(os.path.join(out, 'bootstrap.json'))[0]
        assert result['successes'] + result['failures'] == 3

    def test_negative_resamples(self, simulated_csv, tmp_path):
        with pytest.raises(CommandError) as excinfo:
            run('bootstrap', '--data', simulated_csv, '--family', 'mlr', '--B', '-1',
                '--out', str(tmp_path))
        assert excinfo.value.returncode == 1


class TestReportCommand(object):

    @pytest.fixture
    def study_json(self, tmp_path):
        out = str(tmp_path / 'study')
        run('study', '--out', out, '--seed', '3', '--threads', '1', 'small-sample',
            '--truth', 'mlr', '--scenario', '1', '--n-dev', '200', '--reps', '2',
            '--n-eval', '2000', '--families', 'mlr,ac-po')
        return os.path.join(out, 'study.json')

    def test_csv(self, study_json, tmp_path):
        from studies.reports import LEADING, TRAILING
        from studies.validation import table_columns
        out = str(tmp_path / 'report')
        output = run('report', '--study', study_json, '--format', 'csv', '--out', out)
        assert 'small-sample study: 2 rows over 1 scenarios' in output
        frame = pd.read_csv(os.path.join(out, 'table.csv'))
        assert list(frame.columns) == LEADING + table_columns(3) + TRAILING
        assert frame['family'].tolist() == ['mlr', 'ac-po']
        assert frame['eci'].isna().all()

    def test_json(self, study_json, tmp_path):
        out = str(tmp_path / 'report')
        run('report', '--study', study_json, '--format', 'json', '--out', out)
        records = read_json(os.path.join(out, 'table.json'))
        assert records[0]['eci'] is None
        assert records[1]['replicates'] == 2

    def test_not_a_study(self, tmp_path):
        path = tmp_path / 'study.json'
        path.write_text('{"kind": "large-sample"}')
        with pytest.raises(CommandError) as excinfo:
            run('report', '--study', str(path), '--out', str(tmp_path))
        assert excinfo.value.returncode == 1
