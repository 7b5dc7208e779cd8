from __future__ import annotations

import logging
import os
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

logger = logging.getLogger(__name__)

THREADS_ENV = "PARAGROUP_THREADS"

T = TypeVar("T")
R = TypeVar("R")

_deterministic = False


def configure(*, deterministic: bool) -> None:
    global _deterministic
    _deterministic = bool(deterministic)
    if _deterministic:
        logger.debug("[Parallel] deterministic mode, one worker")


def worker_count() -> int:
    if _deterministic:
        return 1
    raw = os.environ.get(THREADS_ENV, "").strip()
    if raw:
        try:
            value = int(raw)
        except ValueError:
            value = 0
        if value < 1:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
        return value
    return max(1, min(4, os.cpu_count() or 1))


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Map over independent work items (usually representation blocks), preserving order."""
    work = list(items)
    workers = min(worker_count(), len(work))
    if workers <= 1:
        return [fn(item) for item in work]
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="paragroup") as pool:
        return list(pool.map(fn, work))
