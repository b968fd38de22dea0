# apps/explore/field.py
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from apps.common.exceptions import InvalidArgument
from apps.genmodel.attention import attend_batch, bilinear
from apps.genmodel.world_model import WorldModel
from apps.sim2d.geometry import MAX_RANGE, N_BEAMS, beam_angles
from apps.slam.posterior import LatentMapPosterior

logger = logging.getLogger(__name__)


@dataclass
class ExplorationDataset:
    """Everything collected so far: scans, the controls between them and the filtered pose estimates."""
    observations: list = field(default_factory=list)
    controls: list = field(default_factory=list)
    pose_estimates: list = field(default_factory=list)

    def __post_init__(self):
        if len(self.observations) != len(self.pose_estimates) or len(self.controls) > len(self.observations):
            raise InvalidArgument(
                f"Inconsistent dataset: {len(self.observations)} scans, {len(self.pose_estimates)} estimates, "
                f"{len(self.controls)} controls"
            )

    def __len__(self) -> int:
        return len(self.observations)

    def append(self, obs, estimate, control=None) -> None:
        if control is not None:
            self.controls.append(np.asarray(control, dtype=float).reshape(2))
        self.observations.append(np.asarray(obs, dtype=float).reshape(N_BEAMS))
        self.pose_estimates.append(np.asarray(estimate, dtype=float).reshape(3))

    @property
    def pose_array(self) -> np.ndarray:
        return np.asarray(self.pose_estimates, dtype=float).reshape(-1, 3)


@dataclass(frozen=True)
class ObstacleField:
    """Log density of observed obstacle endpoints on a W x H grid, read bilinearly between cell centres."""
    log_density: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.log_density.shape

    def value(self, positions) -> np.ndarray:
        return self.loss_and_grad(positions)[0]

    def loss_and_grad(self, positions, warn: bool = True) -> tuple[np.ndarray, np.ndarray]:
        """Interpolated log density (N,) and its exact gradient (N, 2) w.r.t. position."""
        positions = np.asarray(positions, dtype=float).reshape(-1, 2)
        clipped = np.clip(positions, 0.0, 1.0)
        outside = np.any(clipped != positions, axis=1)
        if warn and np.any(outside):
            logger.warning(f"Clamped {int(outside.sum())} out-of-bounds field lookups to the boundary")
        w, h = self.shape
        att = bilinear(clipped, w, h)
        cells = self.log_density[att.cells[..., 0], att.cells[..., 1]]
        values = np.sum(att.weights * cells, axis=1)
        grads = np.einsum("nk,nkc->nc", cells, att.dweights)
        grads[outside] = 0.0
        return values, grads


def project_endpoints(poses: np.ndarray, scans: np.ndarray) -> np.ndarray:
    """World positions of every beam endpoint that hit something (reading below the maximum range)."""
    poses = np.asarray(poses, dtype=float).reshape(-1, 3)
    scans = np.asarray(scans, dtype=float).reshape(-1, N_BEAMS)
    angles = poses[:, 2:3] + beam_angles()[None, :]
    hit = scans < MAX_RANGE
    xs = poses[:, 0:1] + scans * np.cos(angles)
    ys = poses[:, 1:2] + scans * np.sin(angles)
    return np.column_stack([xs[hit], ys[hit]])


def field_from_endpoints(endpoints: np.ndarray, n_scans: int, size: int = 64, floor: float = 1e-6) -> ObstacleField:
    """Histogram endpoints over size x size cells, normalised by every beam of every scan."""
    if n_scans < 1:
        raise InvalidArgument("An obstacle field needs at least one scan")
    endpoints = np.asarray(endpoints, dtype=float).reshape(-1, 2)
    counts = np.zeros((size, size))
    if endpoints.shape[0]:
        idx = np.clip(np.floor(endpoints * size).astype(int), 0, size - 1)
        np.add.at(counts, (idx[:, 0], idx[:, 1]), 1.0)
    density = counts / (n_scans * N_BEAMS)
    return ObstacleField(np.log(np.maximum(density, floor)))


def build_obstacle_field(
    dataset: ExplorationDataset,
    posterior: LatentMapPosterior,
    model: WorldModel,
    size: int = 64,
    floor: float = 1e-6,
) -> ObstacleField:
    """Project the scans predicted under the posterior-mean map at every estimated pose."""
    if len(dataset) == 0:
        raise InvalidArgument("Cannot build an obstacle field from an empty dataset")
    poses = dataset.pose_array
    charts, _ = attend_batch(posterior.mu, poses[:, :2])
    scans = model.emission.mean(charts, poses[:, 2])
    return field_from_endpoints(project_endpoints(poses, scans), len(dataset), size, floor)


def obstacle_loss(obstacles: ObstacleField, position) -> tuple[float, np.ndarray]:
    values, grads = obstacles.loss_and_grad(np.asarray(position, dtype=float).reshape(1, 2))
    return float(values[0]), grads[0]
