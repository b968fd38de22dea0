# apps/sim2d/geometry.py
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from apps.common.exceptions import InvalidArgument

# -----------------------------
# Sensor / body constants
# -----------------------------

N_BEAMS = 20
BEAM_SPACING = 2.0 * math.pi / N_BEAMS
MAX_RANGE = 0.53
AGENT_RADIUS = 1e-5
DEFAULT_STEP = 0.01
BOUNDS = ((0.0, 0.0), (1.0, 1.0))


def wrap_angle(angle):
    """Wrap radians into [-pi, pi). Works on floats and arrays; in-range values pass through untouched."""
    if isinstance(angle, np.ndarray):
        wrapped = np.mod(angle + math.pi, 2.0 * math.pi) - math.pi
        wrapped = np.where(wrapped >= math.pi, wrapped - 2.0 * math.pi, wrapped)
        return np.where((angle >= -math.pi) & (angle < math.pi), angle, wrapped)
    if -math.pi <= angle < math.pi:
        return angle
    wrapped = (angle + math.pi) % (2.0 * math.pi) - math.pi
    return wrapped - 2.0 * math.pi if wrapped >= math.pi else wrapped


def in_bounds(x: float, y: float, tol: float = 0.0) -> bool:
    (x0, y0), (x1, y1) = BOUNDS
    return x0 - tol <= x <= x1 + tol and y0 - tol <= y <= y1 + tol


def beam_angles(heading: float = 0.0) -> np.ndarray:
    """World-frame beam directions; beam 0 along the heading, counterclockwise."""
    return heading + BEAM_SPACING * np.arange(N_BEAMS)


# -----------------------------
# Domain types
# -----------------------------

@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    heading: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "heading", float(wrap_angle(float(self.heading))))

    @property
    def position(self) -> tuple[float, float]:
        return self.x, self.y

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.heading], dtype=float)

    @classmethod
    def from_array(cls, values) -> "Pose":
        return cls(float(values[0]), float(values[1]), float(values[2]))

    def distance_to(self, other: "Pose | tuple[float, float]") -> float:
        ox, oy = other.position if isinstance(other, Pose) else other
        return math.hypot(self.x - ox, self.y - oy)

    def require_in_bounds(self) -> "Pose":
        if not in_bounds(self.x, self.y):
            raise InvalidArgument(f"Pose ({self.x:.6f}, {self.y:.6f}) lies outside the unit square")
        return self


@dataclass(frozen=True)
class Control:
    dtheta: float = 0.0
    forward: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.dtheta) and math.isfinite(self.forward)):
            raise InvalidArgument(f"Control must be finite, got ({self.dtheta}, {self.forward})")

    def as_array(self) -> np.ndarray:
        return np.array([self.dtheta, self.forward], dtype=float)

    @classmethod
    def from_array(cls, values) -> "Control":
        return cls(float(values[0]), float(values[1]))


@dataclass(frozen=True)
class LidarScan:
    readings: np.ndarray

    def __post_init__(self):
        readings = np.asarray(self.readings, dtype=float).reshape(-1)
        if readings.shape != (N_BEAMS,):
            raise InvalidArgument(f"A scan has {N_BEAMS} readings, got {readings.shape[0]}")
        readings.setflags(write=False)
        object.__setattr__(self, "readings", readings)

    def __getitem__(self, k: int) -> float:
        return float(self.readings[k])

    def __len__(self) -> int:
        return N_BEAMS


def poses_to_array(poses) -> np.ndarray:
    return np.array([p.as_array() for p in poses], dtype=float).reshape(-1, 3)


def controls_to_array(controls) -> np.ndarray:
    return np.array([c.as_array() for c in controls], dtype=float).reshape(-1, 2)


def tile_indices(positions, tiles: int) -> np.ndarray:
    """Half-open binning of positions into a tiles x tiles grid over the unit square."""
    if tiles < 1:
        raise InvalidArgument(f"tiles must be >= 1, got {tiles}")
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    idx = np.floor(positions * tiles).astype(int)
    return np.clip(idx, 0, tiles - 1)


def visited_tiles(positions, tiles: int) -> set[tuple[int, int]]:
    if len(positions) == 0:
        return set()
    return {(int(i), int(j)) for i, j in tile_indices(positions, tiles)}
