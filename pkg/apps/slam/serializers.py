from rest_framework import serializers

from apps.common.serializers import FloatListField, VersionedSerializer


class PosteriorSerializer(VersionedSerializer):
    shape = serializers.ListField(child=serializers.IntegerField(min_value=1), min_length=3, max_length=3)
    mu = FloatListField()
    log_sigma2 = FloatListField()

    def validate(self, attrs):
        w, h, d = attrs["shape"]
        if len(attrs["mu"]) != w * h * d or len(attrs["log_sigma2"]) != w * h * d:
            raise serializers.ValidationError("mu and log_sigma2 must hold w * h * d values")
        return attrs


class StepEstimateSerializer(serializers.Serializer):
    t = serializers.IntegerField(min_value=0)
    est_x = serializers.FloatField()
    est_y = serializers.FloatField()
    est_theta = serializers.FloatField()
    abs_err = serializers.FloatField(min_value=0.0)


class SlamResultSerializer(VersionedSerializer):
    per_step = StepEstimateSerializer(many=True)
    final_abs_err = serializers.FloatField(min_value=0.0)
    relative_err = serializers.FloatField(min_value=0.0, allow_null=True)
    mean_abs_err = serializers.FloatField(min_value=0.0, required=False)
    dead_reckoning_err = serializers.FloatField(min_value=0.0, required=False)
    mode = serializers.CharField(required=False)
    seed = serializers.IntegerField(required=False)
