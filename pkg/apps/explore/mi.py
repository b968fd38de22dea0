# apps/explore/mi.py
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from apps.common.exceptions import InvalidArgument
from apps.genmodel.sampling import ancestral_rollout
from apps.genmodel.world_model import WorldModel
from apps.sim2d.geometry import Pose
from apps.slam.posterior import LatentMapPosterior
from .config import EntropyConfig, MiConfig
from .entropy import knn_entropy


@dataclass(frozen=True)
class MiEstimate:
    marginal_entropy: float
    conditional_entropies: tuple[float, ...]

    @property
    def mi(self) -> float:
        return mutual_information(self.marginal_entropy, self.conditional_entropies)


def mutual_information(marginal_entropy: float, conditional_entropies) -> float:
    """H(X) minus the mean conditional entropy; the mean is order independent."""
    conditional_entropies = list(conditional_entropies)
    if not conditional_entropies:
        raise InvalidArgument("At least one conditional entropy is needed")
    return marginal_entropy - math.fsum(conditional_entropies) / len(conditional_entropies)


def _draw_maps(posterior: LatentMapPosterior, count: int, rng: np.random.Generator) -> np.ndarray:
    return posterior.mu + posterior.sigma * rng.normal(size=(count, *posterior.shape))


def observation_samples(
    model: WorldModel, grids: np.ndarray, start: Pose, controls: np.ndarray, count: int, rng: np.random.Generator
) -> np.ndarray:
    """(count, T * 20) observation sequences from `start` under one shared map or a per-sample stack."""
    starts = np.tile(start.as_array(), (count, 1))
    _, obs = ancestral_rollout(grids, starts, controls, model.transition, model.emission, rng)
    return obs


def mi_estimate(
    model: WorldModel,
    posterior: LatentMapPosterior,
    start: Pose,
    controls,
    cfg: MiConfig | None = None,
    rng: np.random.Generator | None = None,
    entropy: EntropyConfig | None = None,
) -> MiEstimate:
    cfg = cfg or MiConfig()
    rng = rng if rng is not None else np.random.default_rng(0)
    controls = np.asarray(controls, dtype=float).reshape(-1, 2)
    if controls.shape[0] != cfg.horizon:
        raise InvalidArgument(f"Candidate has {controls.shape[0]} controls, the horizon is {cfg.horizon}")

    marginal = observation_samples(model, _draw_maps(posterior, cfg.marginal_samples, rng), start, controls, cfg.marginal_samples, rng)
    conditional = []
    for grid in _draw_maps(posterior, cfg.map_samples, rng):
        samples = observation_samples(model, grid, start, controls, cfg.conditional_samples, rng)
        conditional.append(knn_entropy(samples, entropy))
    return MiEstimate(knn_entropy(marginal, entropy), tuple(conditional))


def estimate_mi(
    model: WorldModel,
    posterior: LatentMapPosterior,
    start: Pose,
    controls,
    cfg: MiConfig | None = None,
    rng: np.random.Generator | None = None,
    entropy: EntropyConfig | None = None,
) -> float:
    """Nested Monte-Carlo estimate of I(future observations; map) for one control sequence."""
    return mi_estimate(model, posterior, start, controls, cfg, rng, entropy).mi
