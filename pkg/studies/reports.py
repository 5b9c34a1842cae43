"""Study outputs: the per-scenario performance table (CSV) and the full JSON document."""
import json
import logging
import os

import pandas as pd

from ordcal.api.serializers import render_json
from ordcal.errors import StudyFormatError
from ordcal.utils import write_frame, write_text

from .validation import table_columns

logger = logging.getLogger(__name__)

LEADING = ['scenario', 'family']
TRAILING = ['n_dev', 'n_eval', 'replicates', 'failures', 'redraws', 'excluded']


def study_frame(result):
    """One row per (scenario, family); measure columns for the largest K
    in the study, empty where a scenario has fewer categories."""
    K = max([row.K for row in result.rows] or [2])
    columns = LEADING + table_columns(K) + TRAILING
    records = []
    for row in result.rows:
        record = {'scenario': row.scenario, 'family': row.family}
        record.update(row.measures)
        record.update({
            'n_dev': row.n_dev, 'n_eval': row.n_eval, 'replicates': row.replicates,
            'failures': row.failures, 'redraws': row.redraws,
            'excluded': sum(row.excluded.values()),
        })
        records.append(record)
    return pd.DataFrame(records, columns=columns)


def write_study(result, directory, fmt='json'):
    """Write ``study.json`` (always) and ``study.csv`` (csv format)."""
    from .api.serializers import StudySerializer
    paths = [os.path.join(directory, 'study.json')]
    write_text(paths[0], render_json(StudySerializer(result).data))
    if fmt == 'csv':
        paths.append(os.path.join(directory, 'study.csv'))
        write_frame(paths[1], study_frame(result))
    logger.info('Wrote study. kind="%s" rows="%s" directory="%s"',
                result.kind, len(result.rows), directory)
    return paths


def load_study(path):
    from .api.serializers import StudySerializer
    try:
        with open(path, encoding='utf-8') as handle:
            document = json.load(handle)
    except (OSError, ValueError) as exc:
        raise StudyFormatError('cannot read "{}": {}'.format(path, exc))
    serializer = StudySerializer(data=document)
    if not serializer.is_valid():
        raise StudyFormatError(json.dumps(serializer.errors, sort_keys=True))
    return serializer.save()


def bootstrap_frame(result):
    """apparent / optimism / corrected, one row per measure."""
    return pd.DataFrame([
        {'measure': key, 'apparent': result.apparent[key],
         'optimism': result.optimism[key], 'corrected': result.corrected[key]}
        for key in result.apparent
    ], columns=['measure', 'apparent', 'optimism', 'corrected'])
