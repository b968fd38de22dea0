# apps/genmodel/attention.py
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from apps.common.exceptions import InvalidArgument
from apps.sim2d.geometry import Pose


@dataclass
class MapRealization:
    """One draw of the latent map: grid[i, j] is the cell whose centre is ((i + .5) / w, (j + .5) / h)."""
    grid: np.ndarray

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        if self.grid.ndim != 3 or self.grid.shape[0] < 2 or self.grid.shape[1] < 2:
            raise InvalidArgument(f"A map grid is w x h x D with w, h >= 2, got shape {self.grid.shape}")

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.grid.shape

    @property
    def cell_extent(self) -> float:
        return 1.0 / self.grid.shape[0]

    @classmethod
    def zeros(cls, w: int, h: int, depth: int) -> "MapRealization":
        return cls(np.zeros((w, h, depth)))


@dataclass(frozen=True)
class Attention:
    """Bilinear attention for a batch of positions (N rows)."""
    cells: np.ndarray  # (N, 4, 2) int, order (i0,j0) (i1,j0) (i0,j1) (i1,j1)
    weights: np.ndarray  # (N, 4)
    dweights: np.ndarray  # (N, 4, 2) d weight / d (x, y)


def _axis(coord: np.ndarray, n: int):
    u = coord * n - 0.5
    inside = (u >= 0.0) & (u <= n - 1)
    u = np.clip(u, 0.0, n - 1)
    i0 = np.minimum(np.floor(u).astype(int), n - 2)
    frac = u - i0
    return i0, frac, np.where(inside, float(n), 0.0)


def bilinear(positions: np.ndarray, w: int, h: int) -> Attention:
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    if np.any(positions < 0.0) or np.any(positions > 1.0) or not np.all(np.isfinite(positions)):
        raise InvalidArgument("Attention positions must lie in the unit square")
    i0, fx, dfx = _axis(positions[:, 0], w)
    j0, fy, dfy = _axis(positions[:, 1], h)
    i1, j1 = i0 + 1, j0 + 1

    cells = np.stack(
        [np.stack([i0, j0], -1), np.stack([i1, j0], -1), np.stack([i0, j1], -1), np.stack([i1, j1], -1)], axis=1
    )
    gx, gy = 1.0 - fx, 1.0 - fy
    weights = np.stack([gx * gy, fx * gy, gx * fy, fx * fy], axis=1)
    dweights = np.stack(
        [
            np.stack([-dfx * gy, -gx * dfy], -1),
            np.stack([dfx * gy, -fx * dfy], -1),
            np.stack([-dfx * fy, gx * dfy], -1),
            np.stack([dfx * fy, fx * dfy], -1),
        ],
        axis=1,
    )
    return Attention(cells, weights, dweights)


def attention_weights(pose: Pose, map_shape) -> list[tuple[tuple[int, int], float]]:
    """The four surrounding cells and their bilinear weights; the heading plays no part."""
    att = bilinear(np.array([pose.position]), int(map_shape[0]), int(map_shape[1]))
    return [((int(i), int(j)), float(wt)) for (i, j), wt in zip(att.cells[0], att.weights[0])]


def gather(grid: np.ndarray, att: Attention) -> np.ndarray:
    """(N, 4, D) cell values; grid is (w, h, D) or a per-row stack (N, w, h, D)."""
    i, j = att.cells[..., 0], att.cells[..., 1]
    if grid.ndim == 4:
        rows = np.arange(grid.shape[0])[:, None]
        return grid[rows, i, j]
    return grid[i, j]


def attend_batch(grid: np.ndarray, positions: np.ndarray) -> tuple[np.ndarray, Attention]:
    grid = np.asarray(grid, dtype=float)
    w, h = grid.shape[-3], grid.shape[-2]
    att = bilinear(positions, w, h)
    charts = np.einsum("nk,nkd->nd", att.weights, gather(grid, att))
    return charts, att


def attend_backward(
    grid: np.ndarray, att: Attention, chart_grad: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Pull chart gradients (N, D) back onto the grid and onto the positions (N, 2)."""
    chart_grad = np.asarray(chart_grad, dtype=float).reshape(att.weights.shape[0], -1)
    grid_grad = np.zeros_like(grid, dtype=float)
    contrib = att.weights[:, :, None] * chart_grad[:, None, :]
    i, j = att.cells[..., 0], att.cells[..., 1]
    if grid.ndim == 4:
        rows = np.broadcast_to(np.arange(grid.shape[0])[:, None], i.shape)
        np.add.at(grid_grad, (rows, i, j), contrib)
    else:
        np.add.at(grid_grad, (i, j), contrib)
    cell_dot = np.einsum("nkd,nd->nk", gather(grid, att), chart_grad)
    position_grad = np.einsum("nk,nkc->nc", cell_dot, att.dweights)
    return grid_grad, position_grad


def attend(map_: MapRealization, pose: Pose) -> np.ndarray:
    """Chart = sum of the four attended cells weighted bilinearly."""
    charts, _ = attend_batch(map_.grid, np.array([pose.position]))
    return charts[0]
