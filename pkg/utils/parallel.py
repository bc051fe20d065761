"""
Parallel Module
Thread fan-out with results returned in input order.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from .config import THREADS_ENV_VAR

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


def worker_count(requested: Optional[int] = None) -> int:
    """
    Number of worker threads to use.

    Args:
        requested: Explicit cap; when None the HPL_THREADS environment variable
            is read, falling back to 1

    Returns:
        A positive thread count
    """
    if requested is not None:
        return max(1, int(requested))
    raw = os.environ.get(THREADS_ENV_VAR, '').strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        logger.warning("ignoring %s=%r (not an integer)", THREADS_ENV_VAR, raw)
        return 1


def ordered_map(fn: Callable[[T], R], items: Iterable[T],
                workers: Optional[int] = None) -> List[R]:
    """Apply fn to every item, possibly concurrently; results keep the input order."""
    items = list(items)
    count = min(worker_count(workers), len(items))
    if count <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=count) as pool:
        return list(pool.map(fn, items))
