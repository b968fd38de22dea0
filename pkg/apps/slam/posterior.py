# apps/slam/posterior.py
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from apps.common.exceptions import InvalidArgument
from apps.common.io import dump_json, load_json
from apps.genmodel.attention import MapRealization

LOG_SIGMA2_FLOOR = -30.0


@dataclass
class LatentMapPosterior:
    """Mean-field Gaussian q(M) over a w x h x D grid; starts at the standard-normal prior."""
    mu: np.ndarray
    log_sigma2: np.ndarray

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=float)
        self.log_sigma2 = np.asarray(self.log_sigma2, dtype=float)
        if self.mu.shape != self.log_sigma2.shape or self.mu.ndim != 3:
            raise InvalidArgument(f"Posterior arrays must share a w x h x D shape, got {self.mu.shape}, {self.log_sigma2.shape}")

    @classmethod
    def prior(cls, w: int, h: int, depth: int) -> "LatentMapPosterior":
        return cls(np.zeros((w, h, depth)), np.zeros((w, h, depth)))

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.mu.shape

    @property
    def sigma(self) -> np.ndarray:
        return np.exp(0.5 * np.maximum(self.log_sigma2, LOG_SIGMA2_FLOOR))

    def mean_map(self) -> MapRealization:
        return MapRealization(self.mu.copy())

    @property
    def params(self) -> list[np.ndarray]:
        return [self.mu, self.log_sigma2]

    def set_params(self, params) -> None:
        self.mu, self.log_sigma2 = (np.asarray(p, dtype=float) for p in params)

    def to_dict(self) -> dict:
        return {"shape": list(self.shape), "mu": self.mu.ravel().tolist(), "log_sigma2": self.log_sigma2.ravel().tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "LatentMapPosterior":
        shape = tuple(data["shape"])
        return cls(np.asarray(data["mu"]).reshape(shape), np.asarray(data["log_sigma2"]).reshape(shape))


@dataclass(frozen=True)
class ReparamTape:
    eps: np.ndarray
    sigma: np.ndarray
    clamped: np.ndarray


def sample_map(post: LatentMapPosterior, rng: np.random.Generator) -> tuple[MapRealization, ReparamTape]:
    """M = mu + sigma * eps."""
    eps = rng.normal(size=post.shape)
    sigma = post.sigma
    tape = ReparamTape(eps, sigma, post.log_sigma2 < LOG_SIGMA2_FLOOR)
    return MapRealization(post.mu + sigma * eps), tape


def sample_map_backward(tape: ReparamTape, grid_grad: np.ndarray) -> list[np.ndarray]:
    """Gradients w.r.t. [mu, log_sigma2] of a loss whose gradient w.r.t. the sample is grid_grad."""
    log_sigma2_grad = np.where(tape.clamped, 0.0, 0.5 * grid_grad * tape.eps * tape.sigma)
    return [grid_grad, log_sigma2_grad]


def map_kl(post: LatentMapPosterior) -> float:
    """KL(q(M) || N(0, I)) summed over all cells and dimensions."""
    ls = np.maximum(post.log_sigma2, LOG_SIGMA2_FLOOR)
    return float(0.5 * np.sum(post.mu ** 2 + np.exp(ls) - 1.0 - ls))


def map_kl_grad(post: LatentMapPosterior) -> list[np.ndarray]:
    ls = np.maximum(post.log_sigma2, LOG_SIGMA2_FLOOR)
    return [post.mu.copy(), np.where(post.log_sigma2 < LOG_SIGMA2_FLOOR, 0.0, 0.5 * (np.exp(ls) - 1.0))]


def save_posterior(path: str | Path, post: LatentMapPosterior) -> Path:
    return dump_json(path, post.to_dict())


def load_posterior(path: str | Path) -> LatentMapPosterior:
    from .serializers import PosteriorSerializer

    return LatentMapPosterior.from_dict(load_json(path, PosteriorSerializer))
