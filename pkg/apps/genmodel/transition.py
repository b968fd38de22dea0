# apps/genmodel/transition.py
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from apps.common.exceptions import InvalidArgument, UnsupportedOperation
from apps.nn.config import NetConfig
from apps.nn.dense import DenseNet
from apps.sim2d.geometry import AGENT_RADIUS, DEFAULT_STEP, N_BEAMS, Control, LidarScan, Pose, wrap_angle
from .config import TransitionVariant
from .emission import EmissionModel, shift_scans

# x, y, cos, sin, dtheta, forward, agent-frame scan
N_FEATURES = 6 + N_BEAMS


def _as_rows(values, width: int, n: int) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    return np.broadcast_to(arr.reshape(-1, width), (n, width)) if arr.ndim < 2 or arr.shape[0] == 1 else arr


def _finish(positions: np.ndarray, headings: np.ndarray) -> np.ndarray:
    return np.column_stack([np.clip(positions, 0.0, 1.0), wrap_angle(headings)])


# -----------------------------
# Engineered transition
# -----------------------------

def engineered_step(poses: np.ndarray, controls, scans: np.ndarray, margin: float = AGENT_RADIUS) -> np.ndarray:
    """
    Rotate, then move forward unless the predicted reading in the new heading is
    shorter than the step, in which case stop `margin` short of it. `scans` are
    agent-frame predictions at the current poses.
    """
    poses = np.asarray(poses, dtype=float).reshape(-1, 3)
    n = poses.shape[0]
    controls = _as_rows(controls, 2, n)
    scans = _as_rows(scans, N_BEAMS, n)
    dtheta, forward = controls[:, 0], controls[:, 1]

    headings = poses[:, 2] + dtheta
    look = np.where(forward >= 0.0, dtheta, dtheta + math.pi)
    front = shift_scans(scans, look)[:, 0]
    magnitude = np.abs(forward)
    travel = np.where(front > magnitude, magnitude, np.maximum(front - margin, 0.0)) * np.sign(forward)
    positions = poses[:, :2] + travel[:, None] * np.column_stack([np.cos(headings), np.sin(headings)])
    return _finish(positions, headings)


def transition_engineered(
    pose: Pose, control: Control, predicted_scan: LidarScan, margin: float = AGENT_RADIUS
) -> Pose:
    return Pose.from_array(engineered_step(pose.as_array(), control.as_array(), predicted_scan.readings, margin)[0])


# -----------------------------
# Smooth free-space kinematics
# -----------------------------

def transition_smooth(pose: Pose, control: Control) -> Pose:
    heading = pose.heading + control.dtheta
    return Pose(
        pose.x + control.forward * math.cos(heading),
        pose.y + control.forward * math.sin(heading),
        heading,
    )


def smooth_rollout(start: Pose, controls: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Positions (T, 2) and unwrapped headings (T,) after each control, ignoring walls."""
    controls = np.asarray(controls, dtype=float).reshape(-1, 2)
    headings = start.heading + np.cumsum(controls[:, 0])
    steps = controls[:, 1:2] * np.column_stack([np.cos(headings), np.sin(headings)])
    return np.asarray(start.position) + np.cumsum(steps, axis=0), headings


def smooth_rollout_backward(
    headings: np.ndarray, controls: np.ndarray, position_grads: np.ndarray, heading_grads: np.ndarray | None = None
) -> np.ndarray:
    """Gradient (T, 2) of a loss on the rollout w.r.t. every (dtheta, forward)."""
    controls = np.asarray(controls, dtype=float).reshape(-1, 2)
    # position t accumulates the moves of every step s <= t
    tail = np.cumsum(position_grads[::-1], axis=0)[::-1]
    cos, sin = np.cos(headings), np.sin(headings)
    d_heading = controls[:, 1] * (-sin * tail[:, 0] + cos * tail[:, 1])
    if heading_grads is not None:
        d_heading = d_heading + heading_grads
    d_dtheta = np.cumsum(d_heading[::-1])[::-1]
    d_forward = cos * tail[:, 0] + sin * tail[:, 1]
    return np.column_stack([d_dtheta, d_forward])


# -----------------------------
# Transition model
# -----------------------------

@dataclass(frozen=True)
class PoseGaussian:
    mean: Pose
    sigma: float

    def sample(self, rng: np.random.Generator) -> Pose:
        if self.sigma == 0.0:
            return self.mean
        noise = self.sigma * rng.normal(size=3)
        x, y = np.clip(np.asarray(self.mean.position) + noise[:2], 0.0, 1.0)
        return Pose(float(x), float(y), self.mean.heading + float(noise[2]))


@dataclass
class TransitionModel:
    variant: str = TransitionVariant.ENGINEERED
    net: DenseNet | None = None
    sigma_t: float = 0.0
    margin: float = AGENT_RADIUS
    delta_scale: float = DEFAULT_STEP

    def __post_init__(self):
        if self.sigma_t < 0:
            raise InvalidArgument(f"sigma_t must be non-negative, got {self.sigma_t}")
        if self.variant == TransitionVariant.LEARNED and self.net is None:
            raise InvalidArgument("The learned transition needs a net")

    @classmethod
    def learned(
        cls,
        rng: np.random.Generator,
        net_config: NetConfig | None = None,
        sigma_t: float = 0.0,
        delta_scale: float = DEFAULT_STEP,
    ) -> "TransitionModel":
        net_config = net_config or NetConfig()
        sizes = [N_FEATURES] + [net_config.hidden_width] * net_config.transition_layers + [3]
        net = DenseNet.init(sizes, rng, activations="relu", output_scale=0.1)
        return cls(TransitionVariant.LEARNED, net, sigma_t, delta_scale=delta_scale)

    @property
    def is_learned(self) -> bool:
        return self.variant == TransitionVariant.LEARNED

    @staticmethod
    def features(poses: np.ndarray, controls: np.ndarray, scans: np.ndarray) -> np.ndarray:
        poses = np.asarray(poses, dtype=float).reshape(-1, 3)
        n = poses.shape[0]
        return np.column_stack(
            [
                poses[:, :2],
                np.cos(poses[:, 2]),
                np.sin(poses[:, 2]),
                _as_rows(controls, 2, n),
                _as_rows(scans, N_BEAMS, n),
            ]
        )

    def mean(self, poses: np.ndarray, controls, scans: np.ndarray) -> np.ndarray:
        """Mean next poses (N, 3) given agent-frame predicted scans at the current poses."""
        poses = np.asarray(poses, dtype=float).reshape(-1, 3)
        if not self.is_learned:
            return engineered_step(poses, controls, scans, self.margin)
        delta = self.delta_scale * self.net(self.features(poses, controls, scans))
        return _finish(poses[:, :2] + delta[:, :2], poses[:, 2] + delta[:, 2])

    def sample(self, poses: np.ndarray, controls, scans: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        mean = self.mean(poses, controls, scans)
        if self.sigma_t == 0.0:
            return mean
        noise = self.sigma_t * rng.normal(size=mean.shape)
        return _finish(mean[:, :2] + noise[:, :2], mean[:, 2] + noise[:, 2])


def transition_learned(
    model: TransitionModel, pose: Pose, control: Control, chart: np.ndarray, emission: EmissionModel
) -> PoseGaussian:
    if not model.is_learned:
        raise UnsupportedOperation("transition_learned needs the learned transition variant")
    scan = emission.mean(np.asarray(chart)[None, :], [pose.heading])
    mean = model.mean(pose.as_array(), control.as_array(), scan)[0]
    return PoseGaussian(Pose.from_array(mean), model.sigma_t)
