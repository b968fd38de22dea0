from rest_framework import serializers

from apps.common.serializers import FloatListField, VersionedSerializer
from .maze import Complexity


class MazeSerializer(VersionedSerializer):
    seed = serializers.IntegerField()
    complexity = serializers.ChoiceField(choices=Complexity.choices)
    side_cells = serializers.IntegerField(min_value=1)
    walls = serializers.ListField(child=FloatListField(min_length=4, max_length=4), min_length=4)
