from rest_framework import serializers

from apps.common.serializers import FloatListField, VersionedSerializer
from .activations import Activation


class DenseNetSerializer(serializers.Serializer):
    sizes = serializers.ListField(child=serializers.IntegerField(min_value=1), min_length=2)
    activations = serializers.ListField(child=serializers.ChoiceField(choices=Activation.choices))
    output_activation = serializers.ChoiceField(choices=Activation.choices)
    weights = serializers.ListField(child=FloatListField())
    biases = serializers.ListField(child=FloatListField())

    def validate(self, attrs):
        sizes = attrs["sizes"]
        layers = list(zip(sizes[:-1], sizes[1:]))
        if len(attrs["activations"]) != len(sizes) - 2:
            raise serializers.ValidationError("one activation per hidden layer is required")
        if [len(w) for w in attrs["weights"]] != [a * b for a, b in layers]:
            raise serializers.ValidationError("weight arrays do not match layer sizes")
        if [len(b) for b in attrs["biases"]] != [b for _, b in layers]:
            raise serializers.ValidationError("bias arrays do not match layer sizes")
        return attrs


class LstmSerializer(serializers.Serializer):
    input_size = serializers.IntegerField(min_value=1)
    hidden_size = serializers.IntegerField(min_value=1)
    w_x = FloatListField()
    w_h = FloatListField()
    b = FloatListField()

    def validate(self, attrs):
        n, h = attrs["input_size"], attrs["hidden_size"]
        if (len(attrs["w_x"]), len(attrs["w_h"]), len(attrs["b"])) != (n * 4 * h, h * 4 * h, 4 * h):
            raise serializers.ValidationError("LSTM arrays do not match input/hidden sizes")
        return attrs


class NetCheckpointSerializer(VersionedSerializer):
    net = DenseNetSerializer()
