from rest_framework import serializers

from apps.common.serializers import FloatListField, VersionedSerializer


class ExperimentReportSerializer(VersionedSerializer):
    metric = serializers.CharField()
    runs = serializers.IntegerField(min_value=1)
    per_seed = serializers.DictField(child=serializers.ListField(child=FloatListField(min_length=2, max_length=2)))
    step = serializers.ListField(child=serializers.IntegerField())
    median = FloatListField()
    q25 = FloatListField()
    q75 = FloatListField()
    q10 = FloatListField()
    q90 = FloatListField()

    def validate(self, attrs):
        n = len(attrs["step"])
        if any(len(attrs[band]) != n for band in ("median", "q25", "q75", "q10", "q90")):
            raise serializers.ValidationError("every band needs one value per step")
        for lo, mid, hi, outer_lo, outer_hi in zip(attrs["q25"], attrs["median"], attrs["q75"], attrs["q10"], attrs["q90"]):
            if not outer_lo <= lo <= mid <= hi <= outer_hi:
                raise serializers.ValidationError("quantile bands must be nested")
        return attrs
