import numpy as np


def make_rng(seed: int | None) -> np.random.Generator:
    """Caller-owned generator; every random operation takes one explicitly."""
    return np.random.default_rng(seed)


def spawn(seed: int, n: int) -> list[np.random.Generator]:
    """Independent child streams for parallel seeds / workers (SeedSequence splitting)."""
    children = np.random.SeedSequence(seed).spawn(n)
    return [np.random.default_rng(child) for child in children]
