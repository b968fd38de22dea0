from dataclasses import dataclass

from .geometry import DEFAULT_STEP


@dataclass(frozen=True)
class WorldConfig:
    """[sim2d] section: maze generation, data collection and hidden actuation noise."""
    complexity: str = "simple"
    side_cells: int = 4
    steps: int = 500
    step: float = DEFAULT_STEP
    max_step: float = 0.05
    # random-walk collection policy
    smoothness: float = 0.8
    turn_std: float = 0.15
    avoid_distance: float = 0.08
    avoid_gain: float = 0.6
    # hidden from the agent; the drift source for SLAM experiments
    noise_dtheta: float = 0.02
    noise_forward: float = 0.002
