"""The two models a plan can be made in: the learned WorldModel or the true simulator."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

import numpy as np

from apps.sim2d.geometry import Control, Pose
from apps.sim2d.maze import MazeSpec
from apps.sim2d.world import raycast, step


class MotionModel(Protocol):
    def predict_scans(self, poses: np.ndarray) -> np.ndarray: ...

    def step_means(self, poses: np.ndarray, controls) -> np.ndarray: ...


@dataclass(frozen=True)
class SimulatorModel:
    """True raycasts and true kinematics; planning in it gives the upper-bound success rate."""
    maze: MazeSpec

    def predict_scans(self, poses: np.ndarray) -> np.ndarray:
        poses = np.asarray(poses, dtype=float).reshape(-1, 3)
        return np.array([raycast(self.maze, Pose.from_array(p)).readings for p in poses])

    def step_means(self, poses: np.ndarray, controls) -> np.ndarray:
        poses = np.asarray(poses, dtype=float).reshape(-1, 3)
        controls = np.broadcast_to(np.asarray(controls, dtype=float).reshape(-1, 2), (poses.shape[0], 2))
        return np.array(
            [step(self.maze, Pose.from_array(p), Control.from_array(c)).as_array() for p, c in zip(poses, controls)]
        ).reshape(-1, 3)
