# apps/sim2d/maze.py
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from django.db import models

from apps.common.exceptions import InvalidArgument
from .geometry import BOUNDS

logger = logging.getLogger(__name__)


class Complexity(models.TextChoices):
    SIMPLE = "simple", "Simple"
    MODERATE = "moderate", "Moderate"
    COMPLEX = "complex", "Complex"


# Probability of knocking out an extra interior wall edge after the recursive
# division; loops make "simple" mazes more open than perfect mazes.
EXTRA_OPENING = {
    Complexity.SIMPLE: 0.35,
    Complexity.MODERATE: 0.15,
    Complexity.COMPLEX: 0.0,
}


@dataclass(frozen=True)
class MazePreset:
    side_cells: int
    map_cells: int  # w = h of the latent map
    map_depth: int
    steps: int  # exploration budget
    tiles: int  # evaluation tiles per side


# Exploration scale matrix, rescaled to the unit-square world: corridor width
# is expressed through side_cells instead of physical maze size.
MAZE_PRESETS: dict[tuple[str, str], MazePreset] = {
    ("simple", "small"): MazePreset(2, 7, 20, 1500, 3),
    ("simple", "medium"): MazePreset(4, 12, 20, 3000, 6),
    ("simple", "large"): MazePreset(6, 18, 20, 4500, 9),
    ("moderate", "small"): MazePreset(4, 12, 20, 3000, 6),
    ("moderate", "medium"): MazePreset(8, 25, 20, 6000, 12),
    ("moderate", "large"): MazePreset(12, 37, 20, 9000, 18),
    ("complex", "small"): MazePreset(8, 25, 20, 6000, 12),
    ("complex", "medium"): MazePreset(16, 50, 20, 12000, 18),
    ("complex", "large"): MazePreset(24, 75, 20, 18000, 24),
}


def boundary_walls() -> list[tuple[float, float, float, float]]:
    (x0, y0), (x1, y1) = BOUNDS
    return [(x0, y0, x1, y0), (x1, y0, x1, y1), (x1, y1, x0, y1), (x0, y1, x0, y0)]


@dataclass(frozen=True)
class MazeSpec:
    """Ground-truth world: wall segments (x1, y1, x2, y2) inside the unit square."""
    walls: tuple[tuple[float, float, float, float], ...]
    seed: int = 0
    complexity: str = Complexity.SIMPLE
    side_cells: int = 1
    bounds: tuple = field(default=BOUNDS, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "walls", tuple(tuple(float(v) for v in w) for w in self.walls))
        (x0, y0), (x1, y1) = self.bounds
        for wall in self.walls:
            xs, ys = (wall[0], wall[2]), (wall[1], wall[3])
            if min(xs) < x0 or max(xs) > x1 or min(ys) < y0 or max(ys) > y1:
                raise InvalidArgument(f"Wall {wall} leaves the maze bounds")

    @cached_property
    def wall_array(self) -> np.ndarray:
        walls = np.array(self.walls, dtype=float).reshape(-1, 4)
        walls.setflags(write=False)
        return walls

    @classmethod
    def empty(cls) -> "MazeSpec":
        """Only the four boundary walls."""
        return cls(walls=tuple(boundary_walls()), seed=0, complexity=Complexity.SIMPLE, side_cells=1)


def _divide(rng: np.random.Generator, edges: list, x0: int, y0: int, w: int, h: int) -> None:
    """Recursive division of the cell block [x0, x0+w) x [y0, y0+h), appending wall edges in order."""
    stack = [(x0, y0, w, h)]
    while stack:
        x0, y0, w, h = stack.pop()
        if w < 2 or h < 2:
            continue
        if w < h:
            horizontal = True
        elif h < w:
            horizontal = False
        else:
            horizontal = bool(rng.integers(0, 2))

        if horizontal:
            wall_y = y0 + int(rng.integers(1, h))
            gap_x = x0 + int(rng.integers(0, w))
            edges.extend(("h", x, wall_y) for x in range(x0, x0 + w) if x != gap_x)
            # pushed in reverse so the lower block is carved first
            stack.append((x0, wall_y, w, y0 + h - wall_y))
            stack.append((x0, y0, w, wall_y - y0))
        else:
            wall_x = x0 + int(rng.integers(1, w))
            gap_y = y0 + int(rng.integers(0, h))
            edges.extend(("v", wall_x, y) for y in range(y0, y0 + h) if y != gap_y)
            stack.append((wall_x, y0, x0 + w - wall_x, h))
            stack.append((x0, y0, wall_x - x0, h))


def _edge_segment(edge: tuple, n: int) -> tuple[float, float, float, float]:
    kind, i, j = edge
    if kind == "h":
        return (i / n, j / n, (i + 1) / n, j / n)
    return (i / n, j / n, i / n, (j + 1) / n)


def generate_maze(seed: int, complexity: str = Complexity.SIMPLE, side_cells: int = 4) -> MazeSpec:
    """
    Connected corridor maze on a side_cells x side_cells lattice scaled into the
    unit square. A pure function of its arguments.
    """
    if side_cells < 2:
        raise InvalidArgument(f"side_cells must be >= 2, got {side_cells}")
    if complexity not in Complexity.values:
        raise InvalidArgument(f"Unknown complexity '{complexity}'. Allowed: {', '.join(Complexity.values)}")

    rng = np.random.default_rng(seed)
    edges: list = []
    _divide(rng, edges, 0, 0, side_cells, side_cells)

    opening = EXTRA_OPENING[Complexity(complexity)]
    if opening > 0.0:
        keep = rng.random(len(edges)) >= opening
        edges = [edge for edge, kept in zip(edges, keep) if kept]

    walls = boundary_walls() + [_edge_segment(edge, side_cells) for edge in edges]
    logger.debug(f"Generated maze seed={seed} complexity={complexity} side_cells={side_cells} walls={len(walls)}")
    return MazeSpec(walls=tuple(walls), seed=int(seed), complexity=str(complexity), side_cells=int(side_cells))


def _segments_cross(p, q, walls: np.ndarray) -> bool:
    """Does the open segment p->q touch any wall segment?"""
    d = np.asarray(q, dtype=float) - np.asarray(p, dtype=float)
    a = walls[:, :2]
    e = walls[:, 2:] - a
    denom = d[0] * e[:, 1] - d[1] * e[:, 0]
    ap = a - np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (ap[:, 0] * e[:, 1] - ap[:, 1] * e[:, 0]) / denom
        s = (ap[:, 0] * d[1] - ap[:, 1] * d[0]) / denom
    hit = (denom != 0) & (t >= 0) & (t <= 1) & (s >= 0) & (s <= 1)
    return bool(hit.any())


def crosses_wall(maze: MazeSpec, p, q) -> bool:
    return _segments_cross(p, q, maze.wall_array)


def flood_fill(maze: MazeSpec, start: tuple[int, int] = (0, 0)) -> set[tuple[int, int]]:
    """Cells of the generating lattice reachable from `start` without crossing a wall."""
    n = maze.side_cells

    def centre(cell):
        return ((cell[0] + 0.5) / n, (cell[1] + 0.5) / n)

    seen = {start}
    frontier = [start]
    while frontier:
        cell = frontier.pop()
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nxt = (cell[0] + di, cell[1] + dj)
            if not (0 <= nxt[0] < n and 0 <= nxt[1] < n) or nxt in seen:
                continue
            if crosses_wall(maze, centre(cell), centre(nxt)):
                continue
            seen.add(nxt)
            frontier.append(nxt)
    return seen


def is_connected(maze: MazeSpec) -> bool:
    return len(flood_fill(maze)) == maze.side_cells ** 2


def preset_for(maze: MazeSpec) -> MazePreset | None:
    """The scale preset generated with this maze's complexity and lattice, if any."""
    for (complexity, _), preset in MAZE_PRESETS.items():
        if complexity == maze.complexity and preset.side_cells == maze.side_cells:
            return preset
    return None
