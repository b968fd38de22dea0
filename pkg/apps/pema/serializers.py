from rest_framework import serializers

from apps.common.serializers import VersionedSerializer
from apps.nn.serializers import DenseNetSerializer, LstmSerializer


class PolicyCheckpointSerializer(VersionedSerializer):
    lstm = LstmSerializer()
    head = DenseNetSerializer()
    forward = serializers.FloatField(min_value=0.0)

    def validate(self, attrs):
        if attrs["head"]["sizes"] != [attrs["lstm"]["hidden_size"], 1]:
            raise serializers.ValidationError("head must map the LSTM hidden state to one output")
        return attrs
