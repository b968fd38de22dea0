"""Maze JSON and trajectory CSV files."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from apps.common.exceptions import FormatError
from apps.common.io import dump_json, load_json
from .geometry import N_BEAMS, Control, LidarScan, Pose
from .maze import MazeSpec
from .policies import RandomWalkPolicy
from .serializers import MazeSerializer
from .world import World

logger = logging.getLogger(__name__)

SCAN_COLUMNS = [f"scan_{k}" for k in range(N_BEAMS)]
TRAJECTORY_COLUMNS = ["t", "x", "y", "theta", "u_dtheta", "u_forward", *SCAN_COLUMNS]


def maze_to_dict(maze: MazeSpec) -> dict:
    return {
        "seed": maze.seed,
        "complexity": str(maze.complexity),
        "side_cells": maze.side_cells,
        "walls": [list(w) for w in maze.walls],
    }


def write_maze(path: str | Path, maze: MazeSpec) -> Path:
    return dump_json(path, maze_to_dict(maze))


def read_maze(path: str | Path) -> MazeSpec:
    data = load_json(path, MazeSerializer)
    return MazeSpec(
        walls=tuple(tuple(w) for w in data["walls"]),
        seed=data["seed"],
        complexity=data["complexity"],
        side_cells=data["side_cells"],
    )


@dataclass
class Trajectory:
    """poses[t], scans[t] at step t; controls[t] takes step t to t+1."""
    poses: list[Pose]
    controls: list[Control]
    scans: list[LidarScan]

    def __post_init__(self):
        if len(self.poses) != len(self.scans) or len(self.controls) != max(len(self.poses) - 1, 0):
            raise FormatError(
                f"Inconsistent trajectory: {len(self.poses)} poses, {len(self.scans)} scans, "
                f"{len(self.controls)} controls"
            )

    def __len__(self) -> int:
        return len(self.poses)

    @property
    def pose_array(self) -> np.ndarray:
        return np.array([p.as_array() for p in self.poses]).reshape(-1, 3)

    @property
    def control_array(self) -> np.ndarray:
        return np.array([c.as_array() for c in self.controls]).reshape(-1, 2)

    @property
    def scan_array(self) -> np.ndarray:
        return np.array([s.readings for s in self.scans]).reshape(-1, N_BEAMS)


def collect_trajectory(
    world: World, steps: int, rng: np.random.Generator, policy: RandomWalkPolicy | None = None
) -> Trajectory:
    """Drive `world` with the random walk for `steps` controls; the true poses are recorded."""
    policy = policy if policy is not None else RandomWalkPolicy()
    poses, controls, scans = [world.pose], [], [world.observe()]
    for _ in range(steps):
        control = policy(rng, scans[-1])
        pose, scan = world.step(control)
        controls.append(control)
        poses.append(pose)
        scans.append(scan)
    return Trajectory(poses, controls, scans)


def trajectory_frame(trajectory: Trajectory) -> pd.DataFrame:
    n = len(trajectory)
    controls = np.full((n, 2), np.nan)
    if trajectory.controls:
        controls[:-1] = [c.as_array() for c in trajectory.controls]
    frame = pd.DataFrame(
        {
            "t": np.arange(n),
            "x": [p.x for p in trajectory.poses],
            "y": [p.y for p in trajectory.poses],
            "theta": [p.heading for p in trajectory.poses],
            "u_dtheta": controls[:, 0],
            "u_forward": controls[:, 1],
        }
    )
    scans = pd.DataFrame(np.array([s.readings for s in trajectory.scans]).reshape(n, N_BEAMS), columns=SCAN_COLUMNS)
    return pd.concat([frame, scans], axis=1)


def write_trajectory(path: str | Path, trajectory: Trajectory) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    trajectory_frame(trajectory).to_csv(path, index=False, na_rep="")
    logger.info(f"Wrote {len(trajectory)} trajectory rows to {path}")
    return path


def read_trajectory(path: str | Path) -> Trajectory:
    path = Path(path)
    if not path.exists():
        raise FormatError(f"File not found: {path}")
    frame = pd.read_csv(path, float_precision="round_trip")
    if list(frame.columns) != TRAJECTORY_COLUMNS:
        raise FormatError(f"{path} does not have the trajectory header {','.join(TRAJECTORY_COLUMNS)}")
    if len(frame) == 0:
        raise FormatError(f"{path} has no rows")

    poses = [Pose(x, y, th) for x, y, th in frame[["x", "y", "theta"]].itertuples(index=False)]
    controls_frame = frame[["u_dtheta", "u_forward"]].iloc[:-1]
    if controls_frame.isna().any().any():
        raise FormatError(f"{path} is missing controls before its last row")
    controls = [Control(float(d), float(f)) for d, f in controls_frame.itertuples(index=False)]
    scans = [LidarScan(row) for row in frame[SCAN_COLUMNS].to_numpy(dtype=float)]
    return Trajectory(poses=poses, controls=controls, scans=scans)
