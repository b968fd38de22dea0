# apps/genmodel/sampling.py
from __future__ import annotations

import numpy as np

from apps.common.exceptions import InvalidArgument
from apps.sim2d.geometry import Control, Pose
from .attention import MapRealization, attend_batch
from .emission import EmissionModel
from .transition import TransitionModel


def ancestral_rollout(
    grids: np.ndarray,
    starts: np.ndarray,
    controls: np.ndarray,
    transition: TransitionModel,
    emission: EmissionModel,
    rng: np.random.Generator,
    sigma_e: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Batched ancestral sampling of S rollouts. `grids` is one (w, h, D) map shared
    by every rollout or a per-rollout stack (S, w, h, D). Returns poses (S, T, 3)
    and observations (S, T * 20), each observation emitted after its control.
    """
    controls = np.asarray(controls, dtype=float).reshape(-1, 2)
    if controls.shape[0] < 1:
        raise InvalidArgument("Ancestral sampling needs a horizon of at least one step")
    sigma = emission.sigma_e if sigma_e is None else sigma_e
    poses = np.array(starts, dtype=float).reshape(-1, 3)
    n = poses.shape[0]

    charts, _ = attend_batch(grids, poses[:, :2])
    scans = emission.mean(charts, poses[:, 2])
    pose_steps, obs_steps = [], []
    for control in controls:
        poses = transition.sample(poses, control, scans, rng)
        charts, _ = attend_batch(grids, poses[:, :2])
        scans = emission.mean(charts, poses[:, 2])
        obs = scans + sigma * rng.normal(size=scans.shape) if sigma > 0 else scans
        pose_steps.append(poses)
        obs_steps.append(obs)
    return np.stack(pose_steps, axis=1), np.concatenate(obs_steps, axis=1).reshape(n, -1)


def ancestral_sample(
    map_: MapRealization,
    start: Pose,
    controls: list[Control] | np.ndarray,
    transition: TransitionModel,
    emission: EmissionModel,
    rng: np.random.Generator,
) -> tuple[list[Pose], np.ndarray]:
    if not isinstance(controls, np.ndarray):
        controls = np.array([c.as_array() for c in controls]).reshape(-1, 2)
    poses, obs = ancestral_rollout(map_.grid, start.as_array(), controls, transition, emission, rng)
    return [Pose.from_array(p) for p in poses[0]], obs[0]
