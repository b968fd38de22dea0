import numpy as np

from apps.common.exceptions import InvalidArgument
from apps.sim2d.geometry import Pose, visited_tiles
from apps.slam.posterior import LatentMapPosterior, map_kl


def infogain_metric(posterior: LatentMapPosterior) -> float:
    """Information gathered so far: KL from the map prior to the current posterior."""
    return map_kl(posterior)


def exploration_ratio(poses, tiles: int) -> float:
    if tiles < 1:
        raise InvalidArgument(f"tiles must be >= 1, got {tiles}")
    if len(poses) == 0:
        return 0.0
    rows = np.array([p.as_array() for p in poses]) if isinstance(poses[0], Pose) else np.asarray(poses, dtype=float)
    return len(visited_tiles(rows[:, :2], tiles)) / float(tiles * tiles)
