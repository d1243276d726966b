"""Deterministic worker-pool helper.

``FRACPLATE_THREADS`` caps the parallelism of embarrassingly parallel probe
loops (default 1: fully sequential).  Results are always collected in
submission order, so the output is identical whatever the cap.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

__all__ = ["worker_count", "thread_map"]


def worker_count() -> int:
    raw = os.environ.get("FRACPLATE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def thread_map(fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
    """Map preserving order; runs in a bounded pool when the cap allows."""
    n = worker_count()
    if n == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))
