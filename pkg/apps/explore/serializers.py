from rest_framework import serializers

from apps.common.serializers import FloatListField, VersionedSerializer


class CycleRecordSerializer(VersionedSerializer):
    cycle = serializers.IntegerField(min_value=0)
    steps_executed = serializers.IntegerField(min_value=0)
    infogain = serializers.FloatField()
    exploration_ratio = serializers.FloatField(min_value=0.0, max_value=1.0)
    selected_mi = serializers.FloatField(allow_null=True)
    candidate_mis = FloatListField(allow_empty=True)
