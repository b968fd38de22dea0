# apps/pema/rollout.py
from __future__ import annotations

import numpy as np

from apps.common.exceptions import InvalidArgument
from apps.sim2d.geometry import Control, Pose, visited_tiles
from apps.sim2d.world import World
from .policy import PemaPolicy


def pema_rollout(policy: PemaPolicy, world: World, start: Pose | None, steps: int) -> list[Pose]:
    """
    Ground-truth poses of a `steps`-long rollout. The first control has zero
    angular velocity; afterwards the scan taken after each step feeds the LSTM,
    which produces the next control.
    """
    if steps < 1:
        raise InvalidArgument(f"steps must be >= 1, got {steps}")
    if start is not None:
        world.pose = start.require_in_bounds()
    policy.reset()
    control = Control(0.0, policy.forward)
    poses = []
    for _ in range(steps):
        pose, scan = world.step(control)
        poses.append(pose)
        control = policy.act(scan)
    return poses


def pema_loss(poses, tiles: int) -> float:
    """Minus the number of distinct tiles (of a tiles x tiles grid) the poses visit."""
    if tiles < 1:
        raise InvalidArgument(f"tiles must be >= 1, got {tiles}")
    positions = np.array([p.position if isinstance(p, Pose) else p[:2] for p in poses], dtype=float).reshape(-1, 2)
    return -float(len(visited_tiles(positions, tiles)))
