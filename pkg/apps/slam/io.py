from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from apps.common.io import dump_json, load_json
from .metrics import localisation_error, per_step_errors
from .serializers import SlamResultSerializer


def slam_result(estimates: np.ndarray, true_poses: np.ndarray, **extra) -> dict:
    estimates = np.asarray(estimates, dtype=float).reshape(-1, 3)
    true_poses = np.asarray(true_poses, dtype=float).reshape(-1, 3)
    mean_err, relative = localisation_error(estimates, true_poses)
    errors = per_step_errors(estimates, true_poses)
    per_step = [
        {"t": t, "est_x": float(e[0]), "est_y": float(e[1]), "est_theta": float(e[2]), "abs_err": float(err)}
        for t, (e, err) in enumerate(zip(estimates, errors))
    ]
    return {
        "per_step": per_step,
        "final_abs_err": float(errors[-1]),
        "relative_err": relative if math.isfinite(relative) else None,
        "mean_abs_err": mean_err,
        **extra,
    }


def write_slam_result(path: str | Path, payload: dict) -> Path:
    return dump_json(path, payload)


def read_slam_result(path: str | Path) -> dict:
    return load_json(path, SlamResultSerializer)
