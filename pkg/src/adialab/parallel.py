"""Deterministic fan-out of independent scan cells across threads.

Worker count comes from the ADIALAB_THREADS environment variable
(default 1); results are always assembled in submission order, so output
tables are byte-stable regardless of completion order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "ADIALAB_THREADS"


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        count = int(raw)
    except ValueError:
        return 1
    return max(1, count)


def ordered_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Apply fn to each item, in parallel when configured, keeping order."""
    values: Sequence[T] = list(items)
    workers = thread_count()
    if workers == 1 or len(values) <= 1:
        return [fn(v) for v in values]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, v) for v in values]
        return [f.result() for f in futures]
