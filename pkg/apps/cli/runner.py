from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

from django.conf import settings

from apps.common.exceptions import InvalidArgument

logger = logging.getLogger(__name__)

T = TypeVar("T")


def seed_list(seed: int, count: int) -> list[int]:
    if count < 1:
        raise InvalidArgument(f"--seeds must be >= 1, got {count}")
    return list(range(seed, seed + count))


def run_seeds(fn: Callable[[int], T], seeds: Sequence[int], workers: int | None = None) -> list[T]:
    """
    Run `fn(seed)` for every seed, in worker threads when workers > 1. Each call
    must build its own engine and derive its RNG streams from its seed; results
    come back in seed order.
    """
    workers = settings.LATMAP_WORKERS if workers is None else workers
    if workers < 1:
        raise InvalidArgument(f"workers must be >= 1, got {workers}")
    seeds = list(seeds)
    if workers == 1 or len(seeds) <= 1:
        return [fn(seed) for seed in seeds]
    logger.info(f"Running {len(seeds)} seeds on {workers} worker threads")
    with ThreadPoolExecutor(max_workers=min(workers, len(seeds))) as executor:
        return list(executor.map(fn, seeds))
