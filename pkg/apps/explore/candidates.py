# apps/explore/candidates.py
from __future__ import annotations

import logging

import numpy as np

from apps.common.exceptions import InvalidArgument
from apps.genmodel.transition import smooth_rollout, smooth_rollout_backward
from apps.nn.adam import AdamState, adam_step
from apps.sim2d.geometry import Pose
from .config import CandidateConfig, MiConfig
from .field import ObstacleField

logger = logging.getLogger(__name__)


def candidate_loss(
    obstacles: ObstacleField, start: Pose, controls: np.ndarray, angle_weight: float = 2.0
) -> tuple[float, np.ndarray]:
    """
    Sum of obstacle log densities along the wall-free rollout plus an L2 penalty
    on the heading change from the start. Returns the loss and d loss / d dtheta.
    """
    positions, headings = smooth_rollout(start, controls)
    values, position_grads = obstacles.loss_and_grad(positions, warn=False)
    turned = headings - start.heading
    loss = float(values.sum() + angle_weight * np.sum(turned ** 2))
    grads = smooth_rollout_backward(headings, controls, position_grads, 2.0 * angle_weight * turned)
    return loss, grads[:, 0]


def optimise_candidate(
    obstacles: ObstacleField, start: Pose, dtheta: np.ndarray, cfg: CandidateConfig
) -> np.ndarray:
    """Adam on the turn angles only; the forward step stays fixed."""
    dtheta = np.asarray(dtheta, dtype=float).copy()
    forward = np.full_like(dtheta, cfg.forward)
    state = AdamState.for_params([dtheta], cfg.learning_rate)
    for _ in range(cfg.steps):
        _, grad = candidate_loss(obstacles, start, np.column_stack([dtheta, forward]), cfg.angle_weight)
        (dtheta,), state = adam_step([dtheta], [grad], state)
    return np.column_stack([dtheta, forward])


def generate_candidates(
    obstacles: ObstacleField,
    start: Pose,
    cfg: MiConfig | None = None,
    rng: np.random.Generator | None = None,
    candidate_cfg: CandidateConfig | None = None,
) -> list[np.ndarray]:
    """F control sequences of length T, each randomly initialised and pushed away from likely obstacles."""
    cfg = cfg or MiConfig()
    candidate_cfg = candidate_cfg or CandidateConfig()
    rng = rng if rng is not None else np.random.default_rng(0)
    if cfg.horizon < 1:
        raise InvalidArgument(f"Candidate horizon must be >= 1, got {cfg.horizon}")
    inits = candidate_cfg.init_std * rng.normal(size=(cfg.candidates, cfg.horizon))
    candidates = [optimise_candidate(obstacles, start, init, candidate_cfg) for init in inits]
    logger.debug(f"Optimised {len(candidates)} candidates of {cfg.horizon} steps")
    return candidates


def select_best(candidates: list[np.ndarray], scores) -> tuple[int, np.ndarray]:
    """Highest score wins; np.argmax keeps the first of equal scores."""
    scores = np.asarray(scores, dtype=float).reshape(-1)
    if len(candidates) == 0 or scores.size == 0:
        raise InvalidArgument("select_best needs at least one candidate")
    if len(candidates) != scores.size:
        raise InvalidArgument(f"{len(candidates)} candidates but {scores.size} scores")
    best = int(np.argmax(scores))
    return best, candidates[best]
