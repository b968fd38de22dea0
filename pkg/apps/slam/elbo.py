# apps/slam/elbo.py
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from apps.common.exceptions import InvalidArgument
from apps.genmodel.attention import MapRealization, attend_backward, attend_batch
from apps.genmodel.emission import EmissionModel, gaussian_logpdf
from apps.genmodel.transition import TransitionModel
from apps.sim2d.geometry import Pose, wrap_angle
from .particles import PoseNormal
from .posterior import LatentMapPosterior, ReparamTape, map_kl, sample_map_backward


@dataclass(frozen=True)
class ElboTerms:
    """Negative-ELBO contributions: reconstruction, pose KL and map KL share."""
    recon: float
    pose_kl: float = 0.0
    map_kl: float = 0.0

    @property
    def total(self) -> float:
        return self.recon + self.pose_kl + self.map_kl

    def __add__(self, other: "ElboTerms") -> "ElboTerms":
        return ElboTerms(self.recon + other.recon, self.pose_kl + other.pose_kl, self.map_kl + other.map_kl)


def _as_pose_array(pose) -> np.ndarray:
    return pose.as_array() if isinstance(pose, Pose) else np.asarray(pose, dtype=float).reshape(3)


def transition_logpdf(
    poses: np.ndarray,
    prev_poses: np.ndarray,
    controls,
    grid: np.ndarray,
    transition: TransitionModel,
    emission: EmissionModel,
) -> np.ndarray:
    """log p(z_t | z_{t-1}, u, M) under an isotropic sigma_t Gaussian around the transition mean."""
    if transition.sigma_t <= 0:
        raise InvalidArgument("The transition density is only defined for sigma_t > 0")
    prev_poses = np.asarray(prev_poses, dtype=float).reshape(-1, 3)
    charts, _ = attend_batch(grid, prev_poses[:, :2])
    mean = transition.mean(prev_poses, controls, emission.mean(charts, prev_poses[:, 2]))
    diff = np.asarray(poses, dtype=float).reshape(-1, 3) - mean
    diff[:, 2] = wrap_angle(diff[:, 2])
    s2 = transition.sigma_t ** 2
    return -0.5 * np.sum(diff * diff, axis=1) / s2 - 1.5 * math.log(2.0 * math.pi * s2)


def pose_kl_term(
    poses: np.ndarray,
    prev_poses: np.ndarray,
    controls,
    proposal: PoseNormal,
    grid: np.ndarray,
    transition: TransitionModel,
    emission: EmissionModel,
) -> float:
    """Sample estimate of log q(z_t) - log p(z_t | z_{t-1}, u, M); zero for a deterministic transition."""
    if transition.sigma_t == 0.0:
        return 0.0
    log_q = proposal.logpdf(poses)
    log_p = transition_logpdf(poses, prev_poses, controls, grid, transition, emission)
    return float(np.mean(log_q - log_p))


def per_step_loss(
    t: int,
    map_: MapRealization,
    pose,
    obs,
    posterior: LatentMapPosterior,
    emission: EmissionModel,
    horizon: int,
    prev_pose=None,
    control=None,
    transition: TransitionModel | None = None,
    proposal: PoseNormal | None = None,
) -> ElboTerms:
    if horizon < 1 or t < 0 or t >= horizon:
        raise InvalidArgument(f"Step {t} is outside a horizon of {horizon}")
    z = _as_pose_array(pose)
    readings = np.asarray(getattr(obs, "readings", obs), dtype=float)
    charts, _ = attend_batch(map_.grid, z[None, :2])
    recon = -float(emission.logpdf(readings[None, :], charts, [z[2]])[0])

    pose_kl = 0.0
    if transition is not None and transition.sigma_t > 0 and proposal is not None and prev_pose is not None:
        pose_kl = pose_kl_term(z[None, :], _as_pose_array(prev_pose)[None, :], control, proposal, map_.grid, transition, emission)
    return ElboTerms(recon, pose_kl, map_kl(posterior) / horizon)


def sequence_loss(
    map_: MapRealization,
    poses: np.ndarray,
    observations: np.ndarray,
    posterior: LatentMapPosterior,
    emission: EmissionModel,
    controls: np.ndarray | None = None,
    transition: TransitionModel | None = None,
    proposals: list[PoseNormal | None] | None = None,
) -> ElboTerms:
    """The whole-sequence negative ELBO for one pose trajectory, evaluated in one batch."""
    poses = np.asarray(poses, dtype=float).reshape(-1, 3)
    observations = np.asarray(observations, dtype=float).reshape(poses.shape[0], -1)
    charts, _ = attend_batch(map_.grid, poses[:, :2])
    recon = -float(np.sum(emission.logpdf(observations, charts, poses[:, 2])))

    pose_kl = 0.0
    if transition is not None and transition.sigma_t > 0 and proposals is not None:
        log_p = transition_logpdf(poses[1:], poses[:-1], controls, map_.grid, transition, emission)
        for t in range(1, poses.shape[0]):
            if proposals[t] is not None:
                pose_kl += float(proposals[t].logpdf(poses[t])[0] - log_p[t - 1])
    return ElboTerms(recon, pose_kl, map_kl(posterior))


def reconstruction_grads(
    map_: MapRealization,
    tape: ReparamTape,
    poses: np.ndarray,
    observations: np.ndarray,
    emission: EmissionModel,
    coefficients: np.ndarray | None = None,
    sigma: float | None = None,
) -> tuple[float, list[np.ndarray], list[np.ndarray]]:
    """
    Value and gradients of -sum_k c_k log p(x_k | M, z_k) w.r.t. [mu, log_sigma2]
    and the emission parameters. Poses are held fixed.
    """
    poses = np.asarray(poses, dtype=float).reshape(-1, 3)
    n = poses.shape[0]
    observations = np.broadcast_to(np.asarray(observations, dtype=float).reshape(-1, emission.net.n_out), (n, emission.net.n_out))
    coefficients = np.ones(n) if coefficients is None else np.asarray(coefficients, dtype=float)
    sigma = emission.sigma_e if sigma is None else sigma

    charts, att = attend_batch(map_.grid, poses[:, :2])
    mean, etape = emission.mean_with_tape(charts, poses[:, 2])
    value = -float(coefficients @ gaussian_logpdf(observations, mean, sigma))
    mean_grad = -coefficients[:, None] * (observations - mean) / sigma ** 2
    chart_grad, _, param_grads = emission.backward(etape, mean_grad)
    grid_grad, _ = attend_backward(map_.grid, att, chart_grad)
    return value, sample_map_backward(tape, grid_grad), param_grads
