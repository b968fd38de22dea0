# apps/slam/engine.py
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from apps.common.exceptions import InvalidArgument
from apps.genmodel.config import ModelConfig
from apps.genmodel.attention import MapRealization
from apps.genmodel.emission import EmissionModel
from apps.genmodel.transition import TransitionModel
from apps.nn.adam import AdamState, adam_step
from apps.nn.config import NetConfig
from apps.sim2d.geometry import N_BEAMS, Control, Pose
from .config import SlamConfig
from .elbo import pose_kl_term, reconstruction_grads
from .particles import (
    ParticleCache,
    advance,
    effective_sample_size,
    filter_step,
    normalize_log_weights,
    particle_loglik,
    proposal_from_particles,
    systematic_indices,
)
from .posterior import LatentMapPosterior, ReparamTape, map_kl, map_kl_grad, sample_map

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LossReport:
    loss: float
    recon: float
    map_kl: float
    pose_kl: float
    mean_ess: float
    chunks: int
    skipped: int

    @property
    def step_skipped(self) -> bool:
        return self.chunks == 0


class SlamEngine:
    """
    Owns the map posterior, the emission parameters and the particle cache for
    one sequence. Observations[t] is the scan at pose t; controls[t] moves pose
    t to pose t + 1.
    """

    def __init__(
        self,
        posterior: LatentMapPosterior,
        emission: EmissionModel,
        transition: TransitionModel,
        start: Pose,
        config: SlamConfig | None = None,
        net_config: NetConfig | None = None,
    ):
        self.config = config or SlamConfig()
        self.posterior = posterior
        self.emission = emission
        self.transition = transition
        self.start = start
        self.cache = ParticleCache.at_start(start.as_array(), self.config.particles)
        self.minibatches = 0
        self._observations: list[np.ndarray] = []
        self._controls: list[np.ndarray] = []
        self._arrays: tuple[np.ndarray, np.ndarray] | None = None
        self.map_adam = AdamState.for_params(posterior.params, self.config.learning_rate, net_config)
        self.emission_adam = AdamState.for_params(emission.net.params, self.config.learning_rate, net_config)

    @classmethod
    def create(
        cls,
        start: Pose,
        rng: np.random.Generator,
        model_config: ModelConfig | None = None,
        config: SlamConfig | None = None,
        net_config: NetConfig | None = None,
        transition: TransitionModel | None = None,
        emission: EmissionModel | None = None,
    ) -> "SlamEngine":
        model_config = model_config or ModelConfig()
        posterior = LatentMapPosterior.prior(model_config.map_w, model_config.map_h, model_config.map_depth)
        emission = emission or EmissionModel.init(model_config.map_depth, rng, net_config, model_config.sigma_e)
        transition = transition or TransitionModel(sigma_t=model_config.sigma_t, margin=model_config.margin)
        return cls(posterior, emission, transition, start, config, net_config)

    # -----------------------------
    # Data
    # -----------------------------

    @property
    def horizon(self) -> int:
        return len(self._observations)

    @property
    def observations(self) -> np.ndarray:
        return self._data()[0]

    @property
    def controls(self) -> np.ndarray:
        return self._data()[1]

    def _data(self) -> tuple[np.ndarray, np.ndarray]:
        if self._arrays is None:
            obs = np.asarray(self._observations, dtype=float).reshape(-1, N_BEAMS)
            ctr = np.asarray(self._controls, dtype=float).reshape(-1, 2)
            self._arrays = (obs, ctr)
        return self._arrays

    def append(self, obs, control=None) -> None:
        """Add the scan at the next pose, plus the control that leaves it when already known."""
        if len(self._controls) < len(self._observations):
            raise InvalidArgument(f"Step {self.horizon} needs the control from step {self.horizon - 1} first")
        self._observations.append(np.asarray(getattr(obs, "readings", obs), dtype=float).reshape(N_BEAMS))
        if control is not None:
            self.add_control(control)
        self._arrays = None

    def add_control(self, control) -> None:
        if len(self._controls) >= len(self._observations):
            raise InvalidArgument("A control must follow the observation it leaves from")
        self._controls.append(np.asarray(control.as_array() if isinstance(control, Control) else control, dtype=float).reshape(2))
        self._arrays = None

    def extend(self, observations: np.ndarray, controls: np.ndarray) -> None:
        observations = np.asarray(observations, dtype=float).reshape(-1, N_BEAMS)
        controls = np.asarray(controls, dtype=float).reshape(-1, 2)
        if controls.shape[0] != observations.shape[0] - 1:
            raise InvalidArgument(f"{observations.shape[0]} observations need {observations.shape[0] - 1} controls")
        for t, obs in enumerate(observations):
            self.append(obs, controls[t] if t < controls.shape[0] else None)

    # -----------------------------
    # Chunks and particles
    # -----------------------------

    def chunk_starts(self) -> np.ndarray:
        return np.arange(0, self.horizon, self.config.chunk_length)

    def sample_batch(self, rng: np.random.Generator) -> np.ndarray:
        starts = self.chunk_starts()
        size = min(self.config.batch_chunks, starts.shape[0])
        return np.sort(rng.choice(starts, size=size, replace=False))

    def refresh(self, t: int, grid: np.ndarray, rng: np.random.Generator) -> None:
        """Filter forward from the latest fresh step to t, restamping everything in between."""
        r = self.cache.latest_fresh(t, self.minibatches, self.config.refresh_period)
        particles = self.cache.get(r)
        obs, ctr = self._data()
        for s in range(r, t):
            _, particles, _ = filter_step(
                particles, ctr[s], obs[s + 1], grid, self.transition, self.emission, rng, self.config.jitter,
                reinit_noise=self.config.reinit_noise,
            )
            self.cache.set(s + 1, particles, self.minibatches)

    def filter_latest(self, rng: np.random.Generator) -> np.ndarray:
        """Filter the newest observation against a fresh map sample; returns the weighted mean pose."""
        t = self.horizon - 1
        if t == 0:
            return self.start.as_array()
        if not self.cache.is_valid(t - 1):
            self.refresh(t - 1, self.posterior.mean_map().grid, rng)
        map_, _ = sample_map(self.posterior, rng)
        obs, ctr = self._data()
        estimate, particles, weights = filter_step(
            self.cache.get(t - 1), ctr[t - 1], obs[t], map_.grid, self.transition, self.emission, rng, self.config.jitter,
            reinit_noise=self.config.reinit_noise,
        )
        self.cache.set(t, particles, self.minibatches)
        logger.debug(f"Filtered step {t}, ESS {effective_sample_size(weights):.1f}")
        return estimate

    # -----------------------------
    # Training
    # -----------------------------

    def minibatch_gradients(
        self, starts, rng: np.random.Generator, sample: tuple[MapRealization, ReparamTape] | None = None
    ) -> tuple[LossReport, list[np.ndarray], list[np.ndarray]]:
        """
        The subsampled negative ELBO, scaled by T / |B|, and its gradients w.r.t.
        [mu, log_sigma2] and the emission parameters. Chunks whose weights
        degenerate are dropped; the cache is refreshed and advanced as a side effect.
        """
        cfg = self.config
        horizon = self.horizon
        starts = np.asarray(starts, dtype=int).reshape(-1)
        if starts.size == 0 or np.any(starts < 0) or np.any(starts >= horizon):
            raise InvalidArgument(f"Chunk starts must be non-empty and within [0, {horizon})")

        map_, tape = sample if sample is not None else sample_map(self.posterior, rng)
        grid = map_.grid
        for s in starts:
            if not self.cache.is_fresh(int(s), self.minibatches, cfg.refresh_period):
                self.refresh(int(s), grid, rng)

        obs, ctr = self._data()
        n = cfg.particles
        lengths = np.minimum(cfg.chunk_length, horizon - starts)
        scale = horizon / float(lengths.sum())
        proposals = [proposal_from_particles(self.cache.get(int(s))) for s in starts]
        particles = np.stack([q.sample(rng, n) for q in proposals])
        alive = np.ones(starts.shape[0], dtype=bool)

        map_grads = [np.zeros_like(p) for p in self.posterior.params]
        emission_grads = [np.zeros_like(p) for p in self.emission.net.params]
        recon, pose_kl, ess, skipped = 0.0, 0.0, [], 0

        for c, s in enumerate(starts):
            if s > 0 and self.transition.sigma_t > 0 and self.cache.is_valid(int(s) - 1):
                pose_kl += scale * pose_kl_term(
                    particles[c], self.cache.get(int(s) - 1), ctr[s - 1], proposals[c], grid, self.transition, self.emission
                )

        for j in range(cfg.chunk_length):
            rows = np.flatnonzero(alive & (j < lengths))
            if rows.size == 0:
                break
            t = starts[rows] + j
            flat = particles[rows].reshape(-1, 3)
            step_obs = np.repeat(obs[t], n, axis=0)
            loglik = particle_loglik(flat, step_obs, grid, self.emission).reshape(rows.size, n)

            bad = ~np.any(np.isfinite(loglik), axis=1) | np.any(np.isnan(loglik), axis=1)
            if np.any(bad):
                logger.warning(f"Degenerate weights in {int(bad.sum())} chunk(s) at offset {j}; dropping them")
                alive[rows[bad]] = False
                skipped += int(bad.sum())
                rows, t, loglik = rows[~bad], t[~bad], loglik[~bad]
                if rows.size == 0:
                    continue
                flat = particles[rows].reshape(-1, 3)
                step_obs = np.repeat(obs[t], n, axis=0)

            weights = normalize_log_weights(loglik)
            ess.extend(np.atleast_1d(effective_sample_size(weights)).tolist())
            idx = systematic_indices(weights, rng).reshape(rows.size, n)
            counts = np.stack([np.bincount(i, minlength=n) for i in idx]) / n

            value, m_grads, e_grads = reconstruction_grads(
                map_, tape, flat, step_obs, self.emission, coefficients=scale * counts.ravel()
            )
            recon += value
            for acc, g in zip(map_grads, m_grads):
                acc += g
            for acc, g in zip(emission_grads, e_grads):
                acc += g

            resampled = np.take_along_axis(particles[rows], idx[:, :, None], axis=1)
            particles[rows] = resampled
            moving = rows[t < horizon - 1]
            if moving.size:
                moved = advance(
                    particles[moving].reshape(-1, 3),
                    np.repeat(ctr[starts[moving] + j], n, axis=0),
                    grid,
                    self.transition,
                    self.emission,
                    rng,
                    cfg.jitter,
                )
                particles[moving] = moved.reshape(moving.size, n, 3)

        for c, s in enumerate(starts):
            if alive[c] and s + cfg.chunk_length < horizon:
                self.cache.set(int(s) + cfg.chunk_length, particles[c], self.minibatches)

        kl = map_kl(self.posterior)
        used = int(alive.sum())
        for acc, g in zip(map_grads, map_kl_grad(self.posterior)):
            acc += g
        mean_ess = float(np.mean(ess)) if ess else 0.0
        return LossReport(recon + kl + pose_kl, recon, kl, pose_kl, mean_ess, used, skipped), map_grads, emission_grads

    def train_minibatch(self, starts, rng: np.random.Generator) -> LossReport:
        """One Adam step on the subsampled loss; a minibatch whose chunks all degenerate is skipped."""
        cfg = self.config
        self.minibatches += 1
        report, map_grads, emission_grads = self.minibatch_gradients(starts, rng)
        if report.step_skipped:
            logger.warning(f"Every chunk in minibatch {self.minibatches} was degenerate; skipping the update")
            return report

        new_params, _ = adam_step(self.posterior.params, map_grads, self.map_adam)
        self.posterior.set_params(new_params)
        if cfg.learn_emission:
            new_net, _ = adam_step(self.emission.net.params, emission_grads, self.emission_adam)
            self.emission.net.set_params(new_net)

        if cfg.log_every and self.minibatches % cfg.log_every == 0:
            logger.info(
                f"Minibatch {self.minibatches}: loss {report.loss:.3f} (recon {report.recon:.3f}, "
                f"map KL {report.map_kl:.3f}), mean ESS {report.mean_ess:.1f}"
            )
        return report


def train_minibatch(engine: SlamEngine, starts, rng: np.random.Generator) -> LossReport:
    return engine.train_minibatch(starts, rng)

