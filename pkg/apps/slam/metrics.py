import math

import numpy as np

from apps.common.exceptions import InvalidArgument
from apps.genmodel.transition import engineered_step
from apps.sim2d.geometry import AGENT_RADIUS, MAX_RANGE, N_BEAMS, Pose


def _pose_rows(poses) -> np.ndarray:
    if len(poses) and isinstance(poses[0], Pose):
        return np.array([p.as_array() for p in poses])
    return np.asarray(poses, dtype=float).reshape(-1, 3)


def localisation_error(estimated, true) -> tuple[float, float]:
    """(mean position error, final position error / true path length)."""
    est, ref = _pose_rows(estimated), _pose_rows(true)
    if est.shape != ref.shape:
        raise InvalidArgument(f"Estimated and true trajectories differ in length: {len(est)} vs {len(ref)}")
    if est.shape[0] == 0:
        raise InvalidArgument("Localisation error needs at least one pose")
    errors = np.linalg.norm(est[:, :2] - ref[:, :2], axis=1)
    length = float(np.sum(np.linalg.norm(np.diff(ref[:, :2], axis=0), axis=1)))
    final = float(errors[-1])
    if length == 0.0:
        relative = 0.0 if final == 0.0 else math.inf
    else:
        relative = final / length
    return float(errors.mean()), relative


def per_step_errors(estimated: np.ndarray, true: np.ndarray) -> np.ndarray:
    return np.linalg.norm(np.asarray(estimated)[:, :2] - np.asarray(true)[:, :2], axis=1)


def dead_reckoning(start: Pose, controls: np.ndarray, margin: float = AGENT_RADIUS) -> np.ndarray:
    """Poses (T + 1, 3) from integrating the commanded controls as if no wall were in sight."""
    controls = np.asarray(controls, dtype=float).reshape(-1, 2)
    poses = [start.as_array()]
    open_scan = np.full(N_BEAMS, MAX_RANGE)
    for control in controls:
        poses.append(engineered_step(poses[-1], control, open_scan, margin)[0])
    return np.asarray(poses)
