#!/usr/bin/env python3
"""
Optospring - Workers
Ordered parallel map over a thread pool capped by OPTOSPRING_THREADS.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

import structlog

logger = structlog.get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "OPTOSPRING_THREADS"


def worker_count(default: Optional[int] = None) -> int:
    """Thread cap from the environment; falls back to the CPU count"""
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            value = int(raw)
            if value >= 1:
                return value
        except ValueError:
            pass
        logger.warning("ignoring invalid thread cap", variable=THREADS_ENV, value=raw)
    return default or os.cpu_count() or 1


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> List[R]:
    """Apply fn to every item; results come back in input order"""
    items = list(items)
    workers = min(workers or worker_count(), max(len(items), 1))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
