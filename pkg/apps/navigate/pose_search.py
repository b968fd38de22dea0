# apps/navigate/pose_search.py
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from apps.common.exceptions import InvalidArgument, NoPoseFound
from apps.genmodel.attention import MapRealization, attend_backward, attend_batch
from apps.genmodel.world_model import WorldModel
from apps.nn.adam import AdamState, adam_step
from apps.sim2d.geometry import N_BEAMS, LidarScan, Pose, wrap_angle
from .config import PoseSearchConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PoseFit:
    pose: Pose
    log_likelihood: float
    # best minus the best optimum further than distinct_radius away; inf when there is none
    runner_up_gap: float


def _readings(obs) -> np.ndarray:
    readings = obs.readings if isinstance(obs, LidarScan) else np.asarray(obs, dtype=float).reshape(-1)
    if readings.shape != (N_BEAMS,):
        raise InvalidArgument(f"An observation has {N_BEAMS} readings, got {readings.shape}")
    return readings


def pose_loglik(obs: np.ndarray, poses: np.ndarray, grid: np.ndarray, model: WorldModel) -> tuple[np.ndarray, np.ndarray]:
    """Emission log-likelihood of `obs` at every pose (N,) and its gradient w.r.t. (x, y, heading)."""
    charts, att = attend_batch(grid, poses[:, :2])
    value, chart_grad, heading_grad, _ = model.emission.logpdf_grad(obs[None, :], charts, poses[:, 2])
    _, position_grad = attend_backward(grid, att, chart_grad)
    return value, np.column_stack([position_grad, heading_grad])


def stratified_starts(cfg: PoseSearchConfig) -> np.ndarray:
    """Cell centres of a grid x grid lattice, each paired with `headings` evenly spaced headings."""
    centres = (np.arange(cfg.grid) + 0.5) / cfg.grid
    headings = -math.pi + 2.0 * math.pi * np.arange(cfg.headings) / cfg.headings
    xs, ys, hs = np.meshgrid(centres, centres, headings, indexing="ij")
    return np.column_stack([xs.ravel(), ys.ravel(), hs.ravel()])


def _ascend(obs, poses, grid, model, cfg: PoseSearchConfig) -> np.ndarray:
    state = AdamState.for_params([poses], cfg.learning_rate)
    alive = np.ones(poses.shape[0], dtype=bool)
    for step in range(cfg.steps):
        value, grad = pose_loglik(obs, poses, grid, model)
        alive &= np.isfinite(value) & np.all(np.isfinite(grad), axis=1)
        grad = np.where(alive[:, None], grad, 0.0)
        # linear decay so the last steps settle instead of orbiting the optimum
        state.lr = cfg.learning_rate * (1.0 - step / cfg.steps)
        (poses,), state = adam_step([poses], [-grad], state)
        poses[:, :2] = np.clip(poses[:, :2], 0.0, 1.0)
        poses[:, 2] = wrap_angle(poses[:, 2])
    poses[~alive] = np.nan
    return poses


def fit_pose_from_observation(
    obs,
    model: WorldModel,
    map_: MapRealization | None = None,
    cfg: PoseSearchConfig | None = None,
) -> PoseFit:
    """
    Multi-start maximum-likelihood pose for one scan under the frozen emission
    model and map. Every lattice start is scored, the best `starts` are refined
    by gradient ascent and the best optimum wins.
    """
    cfg = cfg or PoseSearchConfig()
    obs = _readings(obs)
    grid = (map_ or model.map).grid
    candidates = stratified_starts(cfg)
    scores, _ = pose_loglik(obs, candidates, grid, model)
    scores = np.nan_to_num(scores, nan=-np.inf).reshape(cfg.grid * cfg.grid, cfg.headings)
    picks = np.arange(scores.shape[0]) * cfg.headings + np.argmax(scores, axis=1)
    optima = _ascend(obs, candidates[picks].copy(), grid, model, cfg)

    finite = np.all(np.isfinite(optima), axis=1)
    if not np.any(finite):
        raise NoPoseFound(f"All {optima.shape[0]} pose-search starts diverged")
    optima = optima[finite]
    values, _ = pose_loglik(obs, optima, grid, model)
    best = int(np.argmax(values))
    distinct = np.hypot(*(optima[:, :2] - optima[best, :2]).T) > cfg.distinct_radius
    gap = float(values[best] - values[distinct].max()) if np.any(distinct) else math.inf
    logger.debug(f"Pose search: best log-likelihood {values[best]:.3f}, runner-up gap {gap:.3g}")
    return PoseFit(Pose.from_array(optima[best]), float(values[best]), gap)


def pose_from_observation(
    obs, model: WorldModel, map_: MapRealization | None = None, cfg: PoseSearchConfig | None = None
) -> Pose:
    return fit_pose_from_observation(obs, model, map_, cfg).pose
