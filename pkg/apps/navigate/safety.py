import numpy as np
from scipy.special import expit

from apps.sim2d.geometry import N_BEAMS, LidarScan
from .config import SafetyParams


def safety_terms(readings, params: SafetyParams | None = None) -> np.ndarray:
    """Per-beam penalty; expit keeps the far tail from overflowing."""
    params = params or SafetyParams()
    readings = np.asarray(readings, dtype=float)
    return params.mu * expit(-(readings - params.delta) * params.sigma)


def safety_penalties(scans, params: SafetyParams | None = None) -> np.ndarray:
    """(N,) penalties for (N, 20) predicted scans."""
    return safety_terms(np.asarray(scans, dtype=float).reshape(-1, N_BEAMS), params).sum(axis=1)


def safety_penalty(scan: LidarScan, params: SafetyParams | None = None) -> float:
    readings = scan.readings if isinstance(scan, LidarScan) else scan
    return float(safety_penalties(readings, params)[0])
