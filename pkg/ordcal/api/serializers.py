import logging
import math

import numpy as np
from rest_framework import serializers
from rest_framework.renderers import JSONRenderer

from ..errors import SpecificationError
from ..families import STEREOTYPE, ModelSpec
from ..models import FORMAT_VERSION, FittedModel

logger = logging.getLogger(__name__)


def render_json(data):
    return JSONRenderer().render(data, renderer_context={'indent': 2}).decode('utf-8') + '\n'


class FiniteFloatField(serializers.FloatField):
    """Writes NaN and infinities as null; reads null back as NaN."""

    def __init__(self, **kwargs):
        kwargs.setdefault('allow_null', True)
        super(FiniteFloatField, self).__init__(**kwargs)

    def to_representation(self, value):
        if value is None:
            return None
        value = float(value)
        return value if math.isfinite(value) else None

    def validate_empty_values(self, data):
        is_empty, data = super(FiniteFloatField, self).validate_empty_values(data)
        if is_empty and data is None:
            return True, float('nan')
        return is_empty, data


def float_list(**kwargs):
    return serializers.ListField(child=serializers.FloatField(), **kwargs)


class FittedModelSerializer(serializers.Serializer):
    format_version = serializers.IntegerField(write_only=True)
    family = serializers.CharField(source='spec.flag')
    Q = serializers.IntegerField(min_value=1)
    K = serializers.IntegerField(min_value=2)
    columns = serializers.ListField(child=serializers.CharField())
    reference = serializers.IntegerField(min_value=1, default=1)
    alpha = float_list()
    B = serializers.ListField(child=float_list())
    phi = float_list(allow_null=True, required=False, default=None)
    loglik = FiniteFloatField()
    iterations = serializers.IntegerField(min_value=0)
    converged = serializers.BooleanField()
    tolerance = serializers.FloatField()
    loglik_trace = float_list(required=False, default=list)
    gradient_norm = FiniteFloatField(required=False)
    warnings = serializers.ListField(child=serializers.CharField(), required=False,
                                     default=list)
    n = serializers.IntegerField(min_value=0, required=False, default=0)

    def to_representation(self, model):
        data = super(FittedModelSerializer, self).to_representation(model)
        return dict([('format_version', FORMAT_VERSION)] + list(data.items()))

    def validate_format_version(self, version):
        if version != FORMAT_VERSION:
            msg = 'unsupported model format version {}, expected {}'
            raise serializers.ValidationError(msg.format(version, FORMAT_VERSION))
        return version

    def validate_family(self, flag):
        try:
            ModelSpec.from_flag(flag)
        except SpecificationError as exc:
            raise serializers.ValidationError(str(exc))
        return flag

    def validate(self, data):
        spec = ModelSpec.from_flag(data['spec']['flag'])
        Q, K = data['Q'], data['K']
        m = K - 1
        if len(data['columns']) != Q:
            raise serializers.ValidationError('expected {} column names'.format(Q))
        if len(data['alpha']) != m:
            raise serializers.ValidationError('expected {} intercepts'.format(m))
        width = m if not spec.is_proportional and spec.family != STEREOTYPE else 1
        B = data['B']
        if len(B) != Q or any(len(row) != width for row in B):
            msg = 'coefficients must be a {} x {} matrix for {}'
            raise serializers.ValidationError(msg.format(Q, width, spec.flag))
        phi = data.get('phi')
        if spec.family == STEREOTYPE:
            if phi is None or len(phi) != m or phi[0] != 1.0:
                msg = 'stereotype models need {} scaling factors starting with 1'
                raise serializers.ValidationError(msg.format(m))
        elif phi is not None:
            raise serializers.ValidationError('only stereotype models carry scaling factors')
        if not 1 <= data['reference'] <= K:
            raise serializers.ValidationError('reference category outside 1..{}'.format(K))
        if data['reference'] != 1 and spec.flag != 'mlr':
            raise serializers.ValidationError(
                'a reference category applies to the multinomial model only')
        return data

    def create(self, validated_data):
        data = dict(validated_data)
        data.pop('format_version', None)
        data['spec'] = ModelSpec.from_flag(data['spec']['flag'])
        data['alpha'] = np.asarray(data['alpha'], dtype=float)
        data['B'] = np.asarray(data['B'], dtype=float)
        if data.get('phi') is not None:
            data['phi'] = np.asarray(data['phi'], dtype=float)
        return FittedModel(**data)


class WeakCalibrationSerializer(serializers.Serializer):
    target = serializers.CharField(source='target.label')
    kind = serializers.CharField(source='target.kind')
    index = serializers.IntegerField(source='target.index')
    intercept = FiniteFloatField()
    slope = FiniteFloatField()
    converged = serializers.BooleanField()
    message = serializers.CharField(allow_blank=True)


class CalibrationReportSerializer(serializers.Serializer):
    family = serializers.CharField()
    n = serializers.IntegerField()
    K = serializers.IntegerField()
    categories = WeakCalibrationSerializer(many=True)
    dichotomies = WeakCalibrationSerializer(many=True)
    model_specific = WeakCalibrationSerializer(many=True)
    setup = serializers.CharField()
    df = serializers.ListField(child=serializers.IntegerField())
    eci_original = FiniteFloatField()
    eci_rescaled = FiniteFloatField()
    orc = FiniteFloatField()
    rmspe = FiniteFloatField()
    invalid_rows = serializers.IntegerField()
    warnings = serializers.ListField(child=serializers.CharField())


class LRTestResultSerializer(serializers.Serializer):
    predictor = serializers.CharField()
    statistic = FiniteFloatField()
    df = serializers.IntegerField()
    p_value = FiniteFloatField()
    loglik_proportional = FiniteFloatField()
    loglik_relaxed = FiniteFloatField()


class PlotTargetSerializer(serializers.Serializer):
    target = serializers.CharField()
    scatter = serializers.CharField()
    curve = serializers.CharField()
    points = serializers.IntegerField()


class PlotManifestSerializer(serializers.Serializer):
    mode = serializers.ChoiceField(choices=['category', 'dichotomy'])
    targets = PlotTargetSerializer(many=True)


class RunManifestSerializer(serializers.Serializer):
    command = serializers.CharField()
    arguments = serializers.DictField()
    seed = serializers.IntegerField(allow_null=True)
    generator = serializers.CharField()
    version = serializers.CharField()
    inputs = serializers.DictField(child=serializers.CharField())
    outputs = serializers.DictField(child=serializers.CharField())
    created = serializers.DateTimeField()
    warnings = serializers.ListField(child=serializers.CharField(), default=list)
