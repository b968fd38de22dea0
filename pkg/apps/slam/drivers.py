# apps/slam/drivers.py
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from apps.common.exceptions import DegenerateWeights, InvalidArgument
from .engine import LossReport, SlamEngine
from .particles import advance, normalize_log_weights, particle_loglik, perturb_particles, weighted_mean_pose
from .posterior import LatentMapPosterior

logger = logging.getLogger(__name__)


@dataclass
class SlamRun:
    estimates: np.ndarray  # (T, 3)
    posterior: LatentMapPosterior
    engine: SlamEngine
    reports: list[LossReport] = field(default_factory=list)


def _train(engine: SlamEngine, steps: int, rng: np.random.Generator, reports: list[LossReport]) -> None:
    for _ in range(steps):
        reports.append(engine.train_minibatch(engine.sample_batch(rng), rng))


def online_slam(
    stream: Iterable[tuple],
    engine: SlamEngine,
    rng: np.random.Generator,
    updates: int | None = None,
) -> SlamRun:
    """
    `stream` yields (obs, control) per step, where control leaves that step's
    pose (None on the last step). Each step is filtered against a fresh map
    sample and followed by `updates` minibatch updates over the data so far.
    """
    updates = engine.config.online_updates if updates is None else updates
    estimates, reports = [], []
    for obs, control in stream:
        engine.append(obs)
        estimates.append(engine.filter_latest(rng))
        if control is not None:
            engine.add_control(control)
        _train(engine, updates, rng, reports)
        t = engine.horizon - 1
        if t and t % 50 == 0:
            logger.info(f"Online SLAM at step {t}")
    return SlamRun(np.asarray(estimates).reshape(-1, 3), engine.posterior, engine, reports)


def smoothing_sweep(engine: SlamEngine, rng: np.random.Generator) -> np.ndarray:
    """
    One sequential pass over the sequence in chunks. Inside a chunk every
    particle keeps its own path; the chunk-level weights define a categorical
    distribution over those paths, whose weighted means are the estimates. The
    cache is refilled from the same paths.
    """
    cfg = engine.config
    obs, ctr = engine.observations, engine.controls
    horizon = engine.horizon
    grid = engine.posterior.mean_map().grid
    n = cfg.offline_particles

    estimates = np.zeros((horizon, 3))
    particles = np.tile(engine.start.as_array(), (n, 1))
    for s in range(0, horizon, cfg.chunk_length):
        end = min(s + cfg.chunk_length, horizon)
        if s > 0:
            particles = perturb_particles(particles, cfg.offline_chunk_noise, rng)
        paths = [particles]
        log_w = particle_loglik(particles, obs[s], grid, engine.emission, cfg.offline_sigma_e)
        for t in range(s + 1, end):
            paths.append(advance(paths[-1], ctr[t - 1], grid, engine.transition, engine.emission, rng, cfg.jitter))
            log_w = log_w + particle_loglik(paths[-1], obs[t], grid, engine.emission, cfg.offline_sigma_e)
        try:
            weights = normalize_log_weights(log_w)
        except DegenerateWeights:
            logger.warning(f"Degenerate chunk weights at step {s}; using uniform weights")
            weights = np.full(n, 1.0 / n)

        for offset, path in enumerate(paths):
            t = s + offset
            estimates[t] = weighted_mean_pose(path, weights)
            if t > 0:
                keep = rng.choice(n, size=cfg.particles, p=weights)
                engine.cache.set(t, path[keep], engine.minibatches)
        if end < horizon:
            idx = rng.choice(n, size=n, p=weights)
            particles = advance(paths[-1][idx], ctr[end - 1], grid, engine.transition, engine.emission, rng, cfg.jitter)
    return estimates


def offline_slam(
    observations: np.ndarray,
    controls: np.ndarray,
    engine: SlamEngine,
    rng: np.random.Generator,
) -> SlamRun:
    """Alternate minibatch training over the whole sequence with smoothing sweeps; the last sweep is returned."""
    observations = np.asarray(observations, dtype=float)
    if engine.horizon and engine.horizon != observations.shape[0]:
        raise InvalidArgument("The engine already holds a different sequence")
    if engine.horizon == 0:
        engine.extend(observations, controls)

    cfg = engine.config
    reports: list[LossReport] = []
    estimates = None
    for sweep in range(max(cfg.offline_sweeps, 1)):
        _train(engine, cfg.offline_train_steps, rng, reports)
        estimates = smoothing_sweep(engine, rng)
        logger.info(f"Offline sweep {sweep + 1}/{cfg.offline_sweeps} done after {engine.minibatches} minibatches")
    return SlamRun(estimates, engine.posterior, engine, reports)
