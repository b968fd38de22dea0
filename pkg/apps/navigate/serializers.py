from rest_framework import serializers

from apps.common.serializers import FloatListField, VersionedSerializer
from .config import ModelSource, TargetKind


class PlanSerializer(VersionedSerializer):
    start = FloatListField(min_length=3, max_length=3)
    goal = FloatListField(min_length=2, max_length=2)
    controls = serializers.ListField(child=FloatListField(min_length=2, max_length=2), allow_empty=True)
    predicted_poses = serializers.ListField(child=FloatListField(min_length=3, max_length=3), allow_empty=True)
    cost = serializers.FloatField(min_value=0.0)
    expanded_nodes = serializers.IntegerField(min_value=0)

    def validate(self, attrs):
        if len(attrs["controls"]) != len(attrs["predicted_poses"]):
            raise serializers.ValidationError("Every control needs exactly one predicted pose")
        return attrs


class PairRecordSerializer(serializers.Serializer):
    start = FloatListField(min_length=2, max_length=2)
    goal = FloatListField(min_length=2, max_length=2)
    success = serializers.BooleanField()
    final_error = serializers.FloatField(allow_null=True)
    cost = serializers.FloatField(allow_null=True)
    expanded_nodes = serializers.IntegerField(min_value=0)
    controls = serializers.IntegerField(min_value=0)
    inferred_goal = FloatListField(min_length=2, max_length=2, allow_null=True)
    error = serializers.CharField(allow_null=True)


class NavigationReportSerializer(VersionedSerializer):
    model_source = serializers.ChoiceField(choices=ModelSource.choices)
    target = serializers.ChoiceField(choices=TargetKind.choices)
    seed = serializers.IntegerField()
    success_fraction = serializers.FloatField(min_value=0.0, max_value=1.0)
    pairs = PairRecordSerializer(many=True)
