"""
Augmented Random Search over the flat policy parameter vector.

Each iteration draws K unit-variance directions delta and the perturbations
epsilon = sigma * delta, evaluates the policy at theta + epsilon and
theta - epsilon on every training maze (same random starts for both signs) and
moves theta by

    learning_rate / (K * sigma_R) * sum_k (r_forth_k - r_back_k) * epsilon_k

where sigma_R is the standard deviation of the 2K collected rewards.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import pandas as pd

from apps.common.exceptions import InvalidArgument
from apps.sim2d.geometry import Pose
from apps.sim2d.maze import MazeSpec
from apps.sim2d.world import World, random_free_pose
from .config import ArsConfig
from .policy import PemaPolicy
from .rollout import pema_loss, pema_rollout

logger = logging.getLogger(__name__)

REWARD_STD_FLOOR = 1e-8
CURVE_COLUMNS = ["iteration", "mean_reward"]


@dataclass
class ArsResult:
    policy: PemaPolicy
    curve: pd.DataFrame


def random_starts(mazes: Sequence[MazeSpec], rng: np.random.Generator) -> list[Pose]:
    return [random_free_pose(maze, rng) for maze in mazes]


def evaluate_policy(
    policy: PemaPolicy,
    mazes: Sequence[MazeSpec],
    cfg: ArsConfig,
    rng: np.random.Generator,
    starts: Sequence[Pose] | None = None,
) -> float:
    """Reward summed over the mazes: visited reward-grid cells per rollout."""
    if not mazes:
        raise InvalidArgument("At least one training maze is required")
    starts = list(starts) if starts is not None else random_starts(mazes, rng)
    if len(starts) != len(mazes):
        raise InvalidArgument(f"{len(mazes)} mazes need {len(mazes)} starts, got {len(starts)}")
    reward = 0.0
    for maze, start in zip(mazes, starts):
        poses = pema_rollout(policy, World(maze, start), None, cfg.rollout_steps)
        reward -= pema_loss(poses, cfg.reward_tiles)
    return reward


def ars_update(theta: np.ndarray, perturbations: np.ndarray, forth, back, learning_rate: float) -> np.ndarray:
    """One step along the reward-weighted perturbations epsilon_k (already scaled by sigma)."""
    theta = np.asarray(theta, dtype=float)
    perturbations = np.asarray(perturbations, dtype=float).reshape(-1, theta.size)
    forth, back = np.asarray(forth, dtype=float), np.asarray(back, dtype=float)
    if not (forth.shape == back.shape == (perturbations.shape[0],)):
        raise InvalidArgument("One forward and one backward reward per perturbation are required")
    sigma_r = max(float(np.std(np.concatenate([forth, back]))), REWARD_STD_FLOOR)
    return theta + learning_rate / (perturbations.shape[0] * sigma_r) * ((forth - back) @ perturbations)


def ars_train(
    policy: PemaPolicy,
    mazes: Sequence[MazeSpec],
    cfg: ArsConfig | None = None,
    iterations: int | None = None,
    rng: np.random.Generator | None = None,
) -> ArsResult:
    cfg = cfg or ArsConfig()
    iterations = cfg.iterations if iterations is None else iterations
    rng = rng if rng is not None else np.random.default_rng(0)
    if not mazes:
        raise InvalidArgument("At least one training maze is required")
    if iterations < 0:
        raise InvalidArgument(f"iterations must be >= 0, got {iterations}")

    theta = policy.flatten()
    rows = []
    for iteration in range(1, iterations + 1):
        perturbations = cfg.sigma * rng.standard_normal((cfg.perturbations, theta.size))
        forth, back = [], []
        for epsilon in perturbations:
            starts = random_starts(mazes, rng)
            forth.append(evaluate_policy(policy.with_params(theta + epsilon), mazes, cfg, rng, starts))
            back.append(evaluate_policy(policy.with_params(theta - epsilon), mazes, cfg, rng, starts))
        theta = ars_update(theta, perturbations, forth, back, cfg.learning_rate)
        mean_reward = float(np.mean(forth + back))
        rows.append((iteration, mean_reward))
        if iteration % 10 == 0 or iteration == iterations:
            logger.info(f"ARS iteration {iteration}/{iterations}: mean reward {mean_reward:.2f}")

    curve = pd.DataFrame(rows, columns=CURVE_COLUMNS).astype({"iteration": int, "mean_reward": float})
    return ArsResult(policy.with_params(theta), curve)
