# apps/sim2d/world.py
from __future__ import annotations

import logging
import math
from typing import Sequence

import numpy as np

from apps.common.exceptions import InvalidArgument
from .geometry import (
    AGENT_RADIUS,
    MAX_RANGE,
    Control,
    LidarScan,
    Pose,
    beam_angles,
    wrap_angle,
)
from .maze import MazeSpec

logger = logging.getLogger(__name__)


def ray_distances(walls: np.ndarray, origin, angles) -> np.ndarray:
    """
    Distance along each ray to the nearest wall segment (inf when nothing is hit).
    Rays parallel to a wall never hit it.
    """
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    ox, oy = float(origin[0]), float(origin[1])
    dx = np.cos(angles)[:, None]
    dy = np.sin(angles)[:, None]
    ax, ay = walls[:, 0], walls[:, 1]
    ex, ey = walls[:, 2] - ax, walls[:, 3] - ay
    apx, apy = ax - ox, ay - oy

    denom = dx * ey - dy * ex
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (apx * ey - apy * ex) / denom
        s = (apx * dy - apy * dx) / denom
    hit = (denom != 0) & (t >= 0) & (s >= 0) & (s <= 1)
    t = np.where(hit, t, np.inf)
    return t.min(axis=1)


def raycast(maze: MazeSpec, pose: Pose) -> LidarScan:
    """20-beam range scan; beam 0 along the heading, counterclockwise, saturating at MAX_RANGE."""
    pose.require_in_bounds()
    distances = ray_distances(maze.wall_array, pose.position, beam_angles(pose.heading))
    return LidarScan(np.minimum(distances, MAX_RANGE))


def free_distance(maze: MazeSpec, position, angle: float) -> float:
    return float(ray_distances(maze.wall_array, position, [angle])[0])


def wall_clearance(maze: MazeSpec, points) -> np.ndarray:
    """Distance from each (x, y) point to the nearest wall segment."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    walls = maze.wall_array
    if walls.shape[0] == 0:
        return np.full(points.shape[0], np.inf)
    a, e = walls[:, :2], walls[:, 2:] - walls[:, :2]
    rel = points[:, None, :] - a[None]
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.sum(rel * e[None], axis=2) / np.sum(e ** 2, axis=1)
    s = np.clip(np.nan_to_num(s, nan=0.0, posinf=1.0, neginf=0.0), 0.0, 1.0)
    offset = rel - s[..., None] * e[None]
    return np.hypot(offset[..., 0], offset[..., 1]).min(axis=1)


def step(maze: MazeSpec, pose: Pose, control: Control) -> Pose:
    """
    Rotate first, then move along the new heading. Travel is clamped to the free
    distance minus the agent radius (no sliding); rotation is never obstructed.
    """
    heading = wrap_angle(pose.heading + control.dtheta)
    forward = control.forward
    if forward == 0.0:
        return Pose(pose.x, pose.y, heading)

    direction = heading if forward > 0 else heading + math.pi
    clearance = free_distance(maze, pose.position, direction) - AGENT_RADIUS
    travel = math.copysign(max(0.0, min(abs(forward), clearance)), forward)
    x = pose.x + travel * math.cos(heading)
    y = pose.y + travel * math.sin(heading)
    (x0, y0), (x1, y1) = maze.bounds
    return Pose(min(max(x, x0), x1), min(max(y, y0), y1), heading)


def rollout(maze: MazeSpec, start: Pose, controls: Sequence[Control]) -> tuple[list[Pose], list[LidarScan]]:
    """Sequential step + raycast; len(controls) + 1 poses and scans."""
    start.require_in_bounds()
    poses = [start]
    scans = [raycast(maze, start)]
    for control in controls:
        poses.append(step(maze, poses[-1], control))
        scans.append(raycast(maze, poses[-1]))
    return poses, scans


def random_free_pose(maze: MazeSpec, rng: np.random.Generator, margin: float = 0.02) -> Pose:
    """Uniform start pose; walls have zero thickness so any interior point is free."""
    x, y = rng.uniform(margin, 1.0 - margin, size=2)
    return Pose(float(x), float(y), float(rng.uniform(-math.pi, math.pi)))


class World:
    """
    The environment as the agent experiences it: a maze, a hidden true pose and
    optional Gaussian actuation noise that the agent never sees.
    """

    def __init__(
        self,
        maze: MazeSpec,
        start: Pose,
        rng: np.random.Generator | None = None,
        control_noise: tuple[float, float] = (0.0, 0.0),
        max_step: float = 0.05,
    ):
        self.maze = maze
        self.pose = start.require_in_bounds()
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.control_noise = (float(control_noise[0]), float(control_noise[1]))
        self.max_step = float(max_step)
        if min(self.control_noise) < 0:
            raise InvalidArgument(f"Control noise must be non-negative, got {control_noise}")

    def observe(self) -> LidarScan:
        return raycast(self.maze, self.pose)

    def _executed(self, control: Control) -> Control:
        forward = float(np.clip(control.forward, -self.max_step, self.max_step))
        dtheta = control.dtheta
        sd_theta, sd_forward = self.control_noise
        if sd_theta > 0 or sd_forward > 0:
            noise = self.rng.normal(0.0, 1.0, size=2)
            dtheta += sd_theta * noise[0]
            forward += sd_forward * noise[1]
        return Control(dtheta, forward)

    def step(self, control: Control) -> tuple[Pose, LidarScan]:
        self.pose = step(self.maze, self.pose, self._executed(control))
        return self.pose, self.observe()

    def execute(self, controls: Sequence[Control]) -> tuple[list[Pose], list[LidarScan]]:
        """Apply controls in order; returns the poses and scans after each one."""
        poses, scans = [], []
        for control in controls:
            pose, scan = self.step(control)
            poses.append(pose)
            scans.append(scan)
        return poses, scans
