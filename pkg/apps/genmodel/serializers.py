from rest_framework import serializers

from apps.common.serializers import FloatListField, VersionedSerializer
from apps.nn.serializers import DenseNetSerializer
from .config import TransitionVariant


class MapBlockSerializer(serializers.Serializer):
    w = serializers.IntegerField(min_value=2)
    h = serializers.IntegerField(min_value=2)
    d = serializers.IntegerField(min_value=1)
    cells = FloatListField()

    def validate(self, attrs):
        if len(attrs["cells"]) != attrs["w"] * attrs["h"] * attrs["d"]:
            raise serializers.ValidationError("cells must hold w * h * d values")
        return attrs


class EmissionBlockSerializer(serializers.Serializer):
    sigma_e = serializers.FloatField(min_value=0.0)
    net = DenseNetSerializer()


class TransitionBlockSerializer(serializers.Serializer):
    variant = serializers.ChoiceField(choices=TransitionVariant.choices)
    sigma_t = serializers.FloatField(min_value=0.0)
    margin = serializers.FloatField(min_value=0.0)
    delta_scale = serializers.FloatField()
    net = DenseNetSerializer(required=False, allow_null=True)


class WorldModelSerializer(VersionedSerializer):
    map = MapBlockSerializer()
    emission = EmissionBlockSerializer()
    transition = TransitionBlockSerializer()
