from dataclasses import dataclass, replace

from django.db import models

from apps.sim2d.geometry import AGENT_RADIUS, DEFAULT_STEP


class TransitionVariant(models.TextChoices):
    ENGINEERED = "engineered", "Engineered"
    LEARNED = "learned", "Learned"


@dataclass(frozen=True)
class ModelConfig:
    """[genmodel] section."""
    map_w: int = 32
    map_h: int = 32
    map_depth: int = 10
    sigma_e: float = 0.1
    sigma_t: float = 0.0
    transition: str = TransitionVariant.ENGINEERED
    margin: float = AGENT_RADIUS
    delta_scale: float = DEFAULT_STEP  # learned transition predicts delta / delta_scale
    # transition pretraining
    pretrain_steps: int = 20000
    pretrain_epochs: int = 30
    pretrain_batch: int = 256
    pretrain_lr: float = 1e-3

    def exploration(self) -> "ModelConfig":
        """Deeper cells and a little transition noise while exploring."""
        return replace(self, map_depth=20, sigma_t=0.0004)
