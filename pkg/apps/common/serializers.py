from rest_framework import serializers


class VersionedSerializer(serializers.Serializer):
    """Every latmap document carries format_version = 1."""
    format_version = serializers.IntegerField(min_value=1, max_value=1)


class FloatListField(serializers.ListField):
    child = serializers.FloatField()
