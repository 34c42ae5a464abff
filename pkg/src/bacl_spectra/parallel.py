"""
Ordered trial execution over a process pool
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")


def map_ordered(fn: Callable[..., T], *iterables: Iterable, workers: int = 1) -> List[T]:
    """
    Apply fn over zipped iterables, returning results in input order

    With workers > 1 the calls run in a ProcessPoolExecutor, so fn and its
    arguments must be picklable. Output order never depends on scheduling.

    Args:
        fn: Top-level function
        *iterables: Argument columns, zipped like the builtin map
        workers (int): Process count; 1 runs in-process

    Returns:
        list: fn results in input order
    """
    columns = [list(column) for column in iterables]
    if workers <= 1 or (columns and len(columns[0]) <= 1):
        return list(map(fn, *columns))
    logger.debug("dispatching %d calls to %d workers", len(columns[0]) if columns else 0, workers)
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, *columns))
