# apps/sim2d/policies.py
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import WorldConfig
from .geometry import N_BEAMS, Control, LidarScan


@dataclass
class RandomWalkPolicy:
    """
    Wall-avoiding random walk used for data collection.

    dtheta follows an AR(1) process so the heading changes smoothly; when the
    closest reading drops below `avoid_distance` a turn towards the clearer
    side is added on top. Forward motion is constant.
    """
    config: WorldConfig = field(default_factory=WorldConfig)
    previous: float = 0.0

    def avoidance_turn(self, scan: LidarScan) -> float:
        readings = scan.readings
        closest = float(readings.min())
        if closest >= self.config.avoid_distance:
            return 0.0
        half = N_BEAMS // 2
        left = float(readings[1:half].sum())
        right = float(readings[half + 1:].sum())
        direction = 1.0 if left >= right else -1.0
        return direction * self.config.avoid_gain * (1.0 - closest / self.config.avoid_distance)

    def __call__(self, rng: np.random.Generator, scan: LidarScan) -> Control:
        cfg = self.config
        innovation = math.sqrt(1.0 - cfg.smoothness ** 2) * cfg.turn_std * float(rng.normal())
        self.previous = cfg.smoothness * self.previous + innovation
        return Control(self.previous + self.avoidance_turn(scan), cfg.step)

    def reset(self) -> None:
        self.previous = 0.0


def random_walk_policy(rng: np.random.Generator, scan: LidarScan, policy: RandomWalkPolicy | None = None) -> Control:
    """One control from `policy` (a fresh, memoryless walker when omitted)."""
    policy = policy if policy is not None else RandomWalkPolicy()
    return policy(rng, scan)
