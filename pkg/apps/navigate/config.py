from dataclasses import dataclass, fields

from django.db import models

from apps.common.exceptions import InvalidArgument
from apps.sim2d.geometry import DEFAULT_STEP


class ModelSource(models.TextChoices):
    LEARNED = "learned", "Learned world model"
    SIMULATOR = "simulator", "Ground-truth simulator"


class TargetKind(models.TextChoices):
    POSE = "pose", "Target pose"
    OBSERVATION = "observation", "Target observation"


@dataclass(frozen=True)
class SafetyParams:
    """Sigmoidal wall penalty mu / (1 + exp((reading - delta) * sigma)) per beam."""
    mu: float = 1e4
    delta: float = 0.03
    sigma: float = 1e2

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise InvalidArgument(f"Safety parameter {f.name} must be positive, got {getattr(self, f.name)}")


@dataclass(frozen=True)
class PlannerConfig:
    """[navigate] planner section."""
    cell_size: float = 1.0 / 40.0
    primitives: int = 8
    primitive_steps: int = 3
    turn: float = 0.4
    turn_jitter: float = 0.1
    forward: float = DEFAULT_STEP
    goal_tolerance: float = 0.02
    success_radius: float = 0.05
    max_nodes: int = 20000
    safety_weight: float = 1.0
    # score the safety term at every intermediate pose of a primitive, not just its end
    safety_along_path: bool = False

    def __post_init__(self):
        if self.cell_size <= 0:
            raise InvalidArgument(f"cell_size must be positive, got {self.cell_size}")
        if self.primitives < 1 or self.primitive_steps < 1:
            raise InvalidArgument("A planner needs at least one primitive of at least one step")
        if self.goal_tolerance < 0 or self.max_nodes < 1:
            raise InvalidArgument("goal_tolerance must be >= 0 and max_nodes >= 1")


@dataclass(frozen=True)
class PoseSearchConfig:
    """grid x grid lattice positions, each started from the best of `headings` evenly spaced headings."""
    grid: int = 8
    headings: int = 8
    steps: int = 200
    learning_rate: float = 0.01
    distinct_radius: float = 0.05
