# apps/explore/entropy.py
from __future__ import annotations

import math

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist
from scipy.special import digamma, gammaln

from apps.common.exceptions import InvalidArgument
from .config import EntropyConfig

DISTANCE_FLOOR = 1e-12
# higher dimensions use brute-force pairwise distances
KD_TREE_MAX_DIM = 16


def log_unit_ball_volume(d: int) -> float:
    return 0.5 * d * math.log(math.pi) - float(gammaln(0.5 * d + 1.0))


def kth_neighbour_distances(samples: np.ndarray, k: int) -> np.ndarray:
    """Euclidean distance from every sample to its k-th nearest other sample."""
    n, d = samples.shape
    if d <= KD_TREE_MAX_DIM:
        distances, _ = cKDTree(samples).query(samples, k=k + 1)
        return distances[:, k]
    pairwise = cdist(samples, samples)
    np.fill_diagonal(pairwise, np.inf)
    return np.partition(pairwise, k - 1, axis=1)[:, k - 1]


def knn_entropy(samples, cfg: EntropyConfig | None = None) -> float:
    """Kozachenko-Leonenko differential entropy estimate in nats."""
    cfg = cfg or EntropyConfig()
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    n, d = samples.shape
    if cfg.k < 1:
        raise InvalidArgument(f"k must be >= 1, got {cfg.k}")
    if n <= cfg.k:
        raise InvalidArgument(f"Entropy estimation with k={cfg.k} needs more than {cfg.k} samples, got {n}")
    if d < 1:
        raise InvalidArgument("Samples need at least one dimension")
    radii = np.maximum(kth_neighbour_distances(samples, cfg.k), DISTANCE_FLOOR)
    return float(digamma(n) - digamma(cfg.k) + log_unit_ball_volume(d) + d * np.mean(np.log(radii)))
