from dataclasses import dataclass

from django.db import models

from apps.sim2d.geometry import DEFAULT_STEP


class Strategy(models.TextChoices):
    MI = "mi", "Mutual information"
    RANDOM = "random", "Random walk"
    PEMA = "pema", "Pose-entropy-maximising agent"


@dataclass(frozen=True)
class EntropyConfig:
    k: int = 3


@dataclass(frozen=True)
class MiConfig:
    """
    [explore] sample counts. Defaults are desk scale; `full_scale()` gives the
    full configuration.
    """
    horizon: int = 25
    marginal_samples: int = 16
    map_samples: int = 16
    conditional_samples: int = 48
    candidates: int = 16
    train_steps: int = 500

    @classmethod
    def full_scale(cls) -> "MiConfig":
        return cls(horizon=50, marginal_samples=30, map_samples=40, conditional_samples=100, candidates=40)


@dataclass(frozen=True)
class CandidateConfig:
    steps: int = 500
    learning_rate: float = 0.001
    angle_weight: float = 2.0
    init_std: float = 0.3
    forward: float = DEFAULT_STEP
    field_size: int = 64
    density_floor: float = 1e-6
