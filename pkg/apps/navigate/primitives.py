"""Control primitives expanded at every planner node."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from apps.sim2d.geometry import DEFAULT_STEP, wrap_angle
from .config import PlannerConfig


class Primitives(Protocol):
    def __call__(self, pose: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """(E, K, 2) control sequences to try from `pose`."""
        ...


@dataclass(frozen=True)
class RandomPrimitives:
    """E sequences of K steps; every turn is one of {-turn, 0, turn} plus uniform jitter."""
    count: int = 8
    steps: int = 3
    turn: float = 0.4
    jitter: float = 0.1
    forward: float = DEFAULT_STEP

    @classmethod
    def from_config(cls, cfg: PlannerConfig) -> "RandomPrimitives":
        return cls(cfg.primitives, cfg.primitive_steps, cfg.turn, cfg.turn_jitter, cfg.forward)

    def __call__(self, pose: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        base = rng.choice(np.array([-self.turn, 0.0, self.turn]), size=(self.count, self.steps))
        dtheta = base + rng.uniform(-self.jitter, self.jitter, size=(self.count, self.steps))
        forward = np.full((self.count, self.steps), self.forward)
        return np.stack([dtheta, forward], axis=-1)


@dataclass(frozen=True)
class GridPrimitives:
    """One-step moves of `length` towards the four axis directions, whatever the current heading."""
    length: float

    def __call__(self, pose: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        targets = np.array([0.0, 0.5 * math.pi, math.pi, -0.5 * math.pi])
        dtheta = wrap_angle(targets - float(pose[2]))
        return np.stack([dtheta, np.full(4, self.length)], axis=-1)[:, None, :]
