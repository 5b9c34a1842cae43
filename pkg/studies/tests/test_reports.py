import json
import math

import pytest


class TestStudyFrame(object):

    def test_columns(self, small_study):
        from studies.reports import LEADING, TRAILING, study_frame
        from studies.validation import table_columns
        frame = study_frame(small_study)
        assert list(frame.columns) == LEADING + table_columns(3) + TRAILING
        assert frame['family'].tolist() == ['mlr', 'cl-po']
        assert frame['replicates'].tolist() == [3, 3]
        assert frame['eci'].isna().all()

    def test_mixed_category_counts(self):
        from studies.reports import study_frame
        from studies.validation import PerformanceRow, StudyResult
        rows = [PerformanceRow('mlr-1', 'mlr', 10, 10, 3, measures={'orc': 0.7}),
                PerformanceRow('mlr-6', 'mlr', 10, 10, 4, measures={'orc': 0.8},
                               excluded={'lp_1_slope': 2, 'lp_2_slope': 1})]
        frame = study_frame(StudyResult('large-sample', 1, rows))
        assert 'category_4_slope' in frame.columns
        assert math.isnan(frame.loc[0, 'category_4_slope'])
        assert frame['excluded'].tolist() == [0, 3]


class TestStudyFiles(object):

    def test_round_trip(self, small_study, tmp_path):
        from studies.reports import load_study, write_study
        paths = write_study(small_study, str(tmp_path), fmt='csv')
        assert [p.rsplit('/', 1)[-1] for p in paths] == ['study.json', 'study.csv']
        loaded = load_study(paths[0])
        assert loaded.kind == small_study.kind
        assert loaded.seed == 42
        assert len(loaded.replicates['mlr-1']) == 3
        for before, after in zip(small_study.rows, loaded.rows):
            assert after.family == before.family
            assert after.measures == pytest.approx(before.measures, nan_ok=True)

    def test_nan_written_as_null(self, small_study, tmp_path):
        from studies.reports import write_study
        path = write_study(small_study, str(tmp_path))[0]
        with open(path) as handle:
            document = json.load(handle)
        assert document['rows'][0]['measures']['eci'] is None

    def test_json_only_by_default(self, small_study, tmp_path):
        from studies.reports import write_study
        assert len(write_study(small_study, str(tmp_path))) == 1
        assert not (tmp_path / 'study.csv').exists()

    def test_garbage(self, tmp_path):
        from ordcal.errors import StudyFormatError
        from studies.reports import load_study
        path = tmp_path / 'study.json'
        path.write_text('{"kind": "medium-sample", "rows": []}')
        with pytest.raises(StudyFormatError):
            load_study(str(path))

    def test_not_json(self, tmp_path):
        from ordcal.errors import StudyFormatError
        from studies.reports import load_study
        path = tmp_path / 'study.json'
        path.write_text('kind,rows\n')
        with pytest.raises(StudyFormatError) as exc:
            load_study(str(path))
        assert 'cannot read' in str(exc.value)


class TestBootstrapFrame(object):

    def test_rows(self):
        from studies.reports import bootstrap_frame
        from studies.validation import BootstrapResult
        result = BootstrapResult('mlr', 10, 1, apparent={'orc': 0.75, 'lp_1_slope': 1.0},
                                 optimism={'orc': 0.02, 'lp_1_slope': 0.1},
                                 corrected={'orc': 0.73, 'lp_1_slope': 0.9})
        frame = bootstrap_frame(result)
        assert list(frame.columns) == ['measure', 'apparent', 'optimism', 'corrected']
        assert frame['measure'].tolist() == ['orc', 'lp_1_slope']
        assert frame.loc[1, 'corrected'] == 0.9
