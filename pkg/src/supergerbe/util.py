"""Small shared helpers."""

from __future__ import annotations

import os

from concurrent.futures import ThreadPoolExecutor

__all__ = ["parallel_map", "default_workers"]


def default_workers() -> int:
    """Worker count from SUPERGERBE_PARALLEL, defaulting to 1."""
    raw = os.environ.get("SUPERGERBE_PARALLEL", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parallel_map(fn, items, workers: int | None = None) -> list:
    """Map with a bounded worker pool; results keep input order, so output
    assembly is deterministic regardless of the worker count."""
    items = list(items)
    if workers is None:
        workers = default_workers()
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
