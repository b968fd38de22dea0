from dataclasses import dataclass

from apps.common.exceptions import InvalidArgument
from apps.sim2d.geometry import DEFAULT_STEP


@dataclass(frozen=True)
class ArsConfig:
    """
    [pema] section. Defaults are desk scale (hidden 64, 200-step rollouts, a
    20 x 20 reward grid, 2 training mazes); `full_scale()` gives the full run.
    """
    perturbations: int = 1
    sigma: float = 0.0075
    learning_rate: float = 0.001
    rollout_steps: int = 200
    reward_tiles: int = 20
    hidden: int = 64
    iterations: int = 100
    worlds: int = 2
    forward: float = DEFAULT_STEP

    def __post_init__(self):
        if self.sigma < 0:
            raise InvalidArgument(f"sigma must be >= 0, got {self.sigma}")
        if self.learning_rate <= 0 or self.forward <= 0:
            raise InvalidArgument("learning_rate and forward must be positive")
        for name in ("perturbations", "rollout_steps", "reward_tiles", "hidden", "worlds"):
            if getattr(self, name) < 1:
                raise InvalidArgument(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.iterations < 0:
            raise InvalidArgument(f"iterations must be >= 0, got {self.iterations}")

    @classmethod
    def full_scale(cls) -> "ArsConfig":
        return cls(rollout_steps=1000, reward_tiles=100, hidden=256, worlds=10)
