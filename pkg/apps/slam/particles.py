# apps/slam/particles.py
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from apps.common.exceptions import DegenerateWeights, InvalidArgument, InvalidState
from apps.genmodel.attention import MapRealization, attend_batch
from apps.genmodel.emission import EmissionModel
from apps.genmodel.transition import TransitionModel
from apps.sim2d.geometry import wrap_angle

logger = logging.getLogger(__name__)

VARIANCE_FLOOR = 1e-8


# -----------------------------
# Proposal
# -----------------------------

@dataclass(frozen=True)
class PoseNormal:
    """Independent normal over (x, y, heading); the heading mean is circular."""
    mean: np.ndarray
    var: np.ndarray

    def sample(self, rng: np.random.Generator, k: int) -> np.ndarray:
        draws = self.mean + np.sqrt(self.var) * rng.normal(size=(k, 3))
        return np.column_stack([np.clip(draws[:, :2], 0.0, 1.0), wrap_angle(draws[:, 2])])

    def logpdf(self, poses: np.ndarray) -> np.ndarray:
        poses = np.asarray(poses, dtype=float).reshape(-1, 3)
        diff = poses - self.mean
        diff[:, 2] = wrap_angle(diff[:, 2])
        return -0.5 * np.sum(diff * diff / self.var + np.log(2.0 * np.pi * self.var), axis=1)


def particle_moments(particles: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean and population variance per pose dimension, without flooring."""
    particles = np.asarray(particles, dtype=float).reshape(-1, 3)
    if particles.shape[0] < 2:
        raise InvalidArgument(f"Moment matching needs at least 2 particles, got {particles.shape[0]}")
    positions = particles[:, :2]
    heading = float(np.arctan2(np.sin(particles[:, 2]).mean(), np.cos(particles[:, 2]).mean()))
    spread = wrap_angle(particles[:, 2] - heading)
    mean = np.array([*positions.mean(axis=0), heading])
    var = np.array([*positions.var(axis=0), float(np.mean(spread ** 2))])
    return mean, var


def proposal_from_particles(particles: np.ndarray) -> PoseNormal:
    mean, var = particle_moments(particles)
    return PoseNormal(mean, np.maximum(var, VARIANCE_FLOOR))


def weighted_mean_pose(particles: np.ndarray, weights: np.ndarray | None = None) -> np.ndarray:
    particles = np.asarray(particles, dtype=float).reshape(-1, 3)
    w = np.full(particles.shape[0], 1.0 / particles.shape[0]) if weights is None else np.asarray(weights, dtype=float)
    xy = w @ particles[:, :2]
    heading = np.arctan2(w @ np.sin(particles[:, 2]), w @ np.cos(particles[:, 2]))
    return np.array([xy[0], xy[1], heading])


# -----------------------------
# Weights and resampling
# -----------------------------

def normalize_log_weights(log_weights: np.ndarray) -> np.ndarray:
    """Softmax along the last axis; raises when a row has no finite entry."""
    log_weights = np.asarray(log_weights, dtype=float)
    if log_weights.shape[-1] < 1:
        raise InvalidArgument("Importance weighting needs at least one sample")
    if np.any(np.isnan(log_weights)):
        raise DegenerateWeights("NaN log-likelihood among particles")
    if np.any(np.all(np.isneginf(log_weights), axis=-1)):
        raise DegenerateWeights("Every particle has zero likelihood")
    return np.exp(log_weights - logsumexp(log_weights, axis=-1, keepdims=True))


def particle_loglik(
    samples: np.ndarray, obs: np.ndarray, grid: np.ndarray, emission: EmissionModel, sigma: float | None = None
) -> np.ndarray:
    samples = np.asarray(samples, dtype=float).reshape(-1, 3)
    charts, _ = attend_batch(grid, samples[:, :2])
    obs = np.broadcast_to(np.asarray(obs, dtype=float).reshape(-1, emission.net.n_out), (samples.shape[0], emission.net.n_out))
    return emission.logpdf(obs, charts, samples[:, 2], sigma)


def importance_weights(
    samples: np.ndarray, obs, map_: MapRealization, emission: EmissionModel, sigma: float | None = None
) -> np.ndarray:
    """Bootstrap weights: proportional to the emission likelihood of `obs` at each sample."""
    readings = getattr(obs, "readings", obs)
    return normalize_log_weights(particle_loglik(samples, readings, map_.grid, emission, sigma))


def effective_sample_size(weights: np.ndarray) -> np.ndarray | float:
    weights = np.asarray(weights, dtype=float)
    ess = 1.0 / np.sum(weights * weights, axis=-1)
    return float(ess) if np.ndim(ess) == 0 else ess


def systematic_indices(weights: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One stratified offset per row; `weights` is (K,) or (C, K)."""
    weights = np.asarray(weights, dtype=float)
    rows = np.atleast_2d(weights)
    k = rows.shape[1]
    offsets = rng.random(size=(rows.shape[0], 1))
    points = (offsets + np.arange(k)[None, :]) / k
    cumulative = np.cumsum(rows, axis=1)
    cumulative[:, -1] = 1.0
    idx = np.stack([np.searchsorted(c, p, side="right") for c, p in zip(cumulative, points)])
    idx = np.minimum(idx, k - 1)
    return idx[0] if weights.ndim == 1 else idx


def multinomial_indices(weights: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    weights = np.asarray(weights, dtype=float)
    return rng.choice(weights.shape[0], size=weights.shape[0], p=weights / weights.sum())


def systematic_resample(samples: np.ndarray, weights: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    return np.asarray(samples)[systematic_indices(weights, rng)]


def multinomial_resample(samples: np.ndarray, weights: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    return np.asarray(samples)[multinomial_indices(weights, rng)]


resample = systematic_resample


# -----------------------------
# Particle cache
# -----------------------------

@dataclass
class ParticleCache:
    """Per-step particle sets with the minibatch counter at which each was written."""
    n_particles: int
    particles: list = field(default_factory=list)
    stamps: list = field(default_factory=list)
    pinned: set = field(default_factory=set)

    def __len__(self) -> int:
        return len(self.particles)

    def ensure_length(self, length: int) -> None:
        while len(self.particles) < length:
            self.particles.append(None)
            self.stamps.append(-1)

    def set(self, t: int, particles: np.ndarray, stamp: int, pin: bool = False) -> None:
        particles = np.asarray(particles, dtype=float)
        if particles.shape != (self.n_particles, 3):
            raise InvalidArgument(f"Cache step {t} expects ({self.n_particles}, 3) particles, got {particles.shape}")
        self.ensure_length(t + 1)
        self.particles[t] = particles.copy()
        self.stamps[t] = stamp
        if pin:
            self.pinned.add(t)

    def get(self, t: int) -> np.ndarray:
        if t >= len(self.particles) or self.particles[t] is None:
            raise InvalidState(f"No particles cached for step {t}")
        return self.particles[t]

    def is_valid(self, t: int) -> bool:
        return t < len(self.particles) and self.particles[t] is not None

    def is_fresh(self, t: int, now: int, period: int) -> bool:
        if not self.is_valid(t):
            return False
        return t in self.pinned or now - self.stamps[t] <= period

    def latest_fresh(self, t: int, now: int, period: int) -> int:
        for r in range(min(t, len(self.particles) - 1), -1, -1):
            if self.is_fresh(r, now, period):
                return r
        raise InvalidState(f"No fresh particles at or before step {t}")

    @classmethod
    def at_start(cls, start: np.ndarray, n_particles: int) -> "ParticleCache":
        cache = cls(n_particles)
        cache.set(0, np.tile(np.asarray(start, dtype=float).reshape(1, 3), (n_particles, 1)), stamp=0, pin=True)
        return cache


# -----------------------------
# Propagation
# -----------------------------

def advance(
    particles: np.ndarray,
    control,
    grid: np.ndarray,
    transition: TransitionModel,
    emission: EmissionModel,
    rng: np.random.Generator,
    jitter: tuple[float, float] = (0.0, 0.0),
) -> np.ndarray:
    """Move every particle one step, conditioning the transition on the predicted scan at its pose."""
    particles = np.asarray(particles, dtype=float).reshape(-1, 3)
    n = particles.shape[0]
    controls = np.broadcast_to(np.asarray(control, dtype=float).reshape(-1, 2), (n, 2))
    if jitter[0] > 0.0 or jitter[1] > 0.0:
        controls = controls + rng.normal(size=(n, 2)) * np.asarray(jitter, dtype=float)
    charts, _ = attend_batch(grid, particles[:, :2])
    scans = emission.mean(charts, particles[:, 2])
    return transition.sample(particles, controls, scans, rng)


def propagate_particles(
    cache: ParticleCache,
    t: int,
    k: int,
    map_: MapRealization,
    transition: TransitionModel,
    emission: EmissionModel,
    controls: np.ndarray,
    rng: np.random.Generator,
    weights: np.ndarray | None = None,
    stamp: int = 0,
    jitter: tuple[float, float] = (0.0, 0.0),
) -> ParticleCache:
    """Resample the set at t, then advance it k steps, writing t+1 .. t+k with `stamp`."""
    controls = np.asarray(controls, dtype=float).reshape(-1, 2)
    if t + k > controls.shape[0]:
        raise InvalidArgument(f"Propagating {k} steps from {t} needs {t + k} controls, got {controls.shape[0]}")
    particles = cache.get(t)
    if weights is None:
        weights = np.full(particles.shape[0], 1.0 / particles.shape[0])
    particles = systematic_resample(particles, weights, rng)
    for s in range(t, t + k):
        particles = advance(particles, controls[s], map_.grid, transition, emission, rng, jitter)
        cache.set(s + 1, particles, stamp)
    return cache


def perturb_particles(particles: np.ndarray, std: float, rng: np.random.Generator) -> np.ndarray:
    """Isotropic pose noise, positions clipped to the square and headings wrapped."""
    if std <= 0.0:
        return particles
    noisy = particles + std * rng.normal(size=particles.shape)
    return np.column_stack([np.clip(noisy[:, :2], 0.0, 1.0), wrap_angle(noisy[:, 2])])


def filter_step(
    particles: np.ndarray,
    control,
    obs: np.ndarray,
    grid: np.ndarray,
    transition: TransitionModel,
    emission: EmissionModel,
    rng: np.random.Generator,
    jitter: tuple[float, float] = (0.0, 0.0),
    sigma: float | None = None,
    reinit_noise: float = 0.01,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Propagate, weight by `obs` and resample. Returns (weighted mean pose,
    resampled particles, weights). When every weight underflows the propagated
    set is perturbed by `reinit_noise` and carried on with uniform weights.
    """
    moved = advance(particles, control, grid, transition, emission, rng, jitter)
    try:
        weights = normalize_log_weights(particle_loglik(moved, obs, grid, emission, sigma))
    except DegenerateWeights:
        logger.warning(f"Degenerate particle weights; reinitialising {moved.shape[0]} particles with noise {reinit_noise}")
        moved = perturb_particles(moved, reinit_noise, rng)
        weights = np.full(moved.shape[0], 1.0 / moved.shape[0])
    return weighted_mean_pose(moved, weights), systematic_resample(moved, weights, rng), weights
