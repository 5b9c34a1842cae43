import logging

from rest_framework import serializers

from ordcal.api.serializers import FiniteFloatField

from ..validation import PerformanceRow, ReplicateRecord, StudyResult

logger = logging.getLogger(__name__)


class ScenarioSerializer(serializers.Serializer):
    id = serializers.CharField()
    form = serializers.CharField()
    number = serializers.IntegerField()
    Q = serializers.IntegerField()
    K = serializers.IntegerField()
    kinds = serializers.ListField(child=serializers.CharField())
    priors = serializers.ListField(child=serializers.FloatField())
    tabulated_priors = serializers.ListField(child=serializers.FloatField(), allow_null=True)
    means = serializers.ListField(child=serializers.ListField(child=serializers.FloatField()),
                                  allow_null=True)
    alpha = serializers.ListField(child=serializers.FloatField(), allow_null=True)
    beta = serializers.ListField(child=serializers.FloatField(), allow_null=True)
    mixture_priors = serializers.ListField(child=serializers.FloatField(), allow_null=True)
    mixture_means = serializers.ListField(
        child=serializers.ListField(child=serializers.FloatField()), allow_null=True)
    orc = serializers.FloatField()
    description = serializers.CharField()
    notes = serializers.CharField(allow_blank=True)


class SimulatedDatasetSerializer(serializers.Serializer):
    scenario = serializers.CharField()
    seed = serializers.IntegerField()
    generator = serializers.CharField()
    n = serializers.IntegerField(source='dataset.n')
    K = serializers.IntegerField(source='dataset.K')
    Q = serializers.IntegerField(source='dataset.Q')
    columns = serializers.ListField(child=serializers.CharField(), source='dataset.columns')
    counts = serializers.SerializerMethodField()

    def get_counts(self, simulated):
        return [int(c) for c in simulated.dataset.counts()]


class MeasuresField(serializers.DictField):
    child = FiniteFloatField()


class PerformanceRowSerializer(serializers.Serializer):
    scenario = serializers.CharField()
    family = serializers.CharField()
    n_dev = serializers.IntegerField()
    n_eval = serializers.IntegerField()
    K = serializers.IntegerField(min_value=2)
    measures = MeasuresField()
    replicates = serializers.IntegerField(min_value=0)
    failures = serializers.IntegerField(min_value=0)
    redraws = serializers.IntegerField(min_value=0)
    excluded = serializers.DictField(child=serializers.IntegerField())
    messages = serializers.ListField(child=serializers.CharField(), default=list)

    def create(self, validated_data):
        return PerformanceRow(**validated_data)


class ReplicateRecordSerializer(serializers.Serializer):
    replicate = serializers.IntegerField()
    seed = serializers.IntegerField()
    redraws = serializers.IntegerField()
    measures = serializers.DictField(child=MeasuresField())
    failures = serializers.DictField(child=serializers.CharField())

    def create(self, validated_data):
        return ReplicateRecord(**validated_data)


class StudySerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=['large-sample', 'small-sample'])
    seed = serializers.IntegerField()
    parameters = serializers.DictField()
    rows = PerformanceRowSerializer(many=True)
    replicates = serializers.DictField(child=ReplicateRecordSerializer(many=True),
                                       required=False, default=dict)

    def create(self, validated_data):
        rows = [PerformanceRow(**row) for row in validated_data['rows']]
        replicates = {
            scenario: [ReplicateRecord(**record) for record in records]
            for scenario, records in validated_data.get('replicates', {}).items()
        }
        return StudyResult(validated_data['kind'], validated_data['seed'], rows,
                           validated_data['parameters'], replicates)


class BootstrapResultSerializer(serializers.Serializer):
    family = serializers.CharField()
    samples = serializers.IntegerField()
    seed = serializers.IntegerField()
    successes = serializers.IntegerField()
    failures = serializers.IntegerField()
    redraws = serializers.IntegerField()
    apparent = MeasuresField()
    optimism = MeasuresField()
    corrected = MeasuresField()
    messages = serializers.ListField(child=serializers.CharField())
