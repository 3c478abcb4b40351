import logging
import os
import warnings
from typing import Optional

from .base_pool import BasePoolImpl, Block
from .serial_pool_impl import SerialPoolImpl
from .thread_pool_impl import ThreadPoolImpl

logger = logging.getLogger(__name__)

THREADS_ENV = "DRIFTWALK_THREADS"


def resolve_workers(workers: Optional[int] = None) -> int:
    """
    Worker count for Monte Carlo blocks.

    An explicit ``workers`` wins; otherwise the DRIFTWALK_THREADS environment
    variable caps os.cpu_count(). The count never affects results.
    """
    if workers is not None:
        return max(1, int(workers))
    available = os.cpu_count() or 1
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return available
    try:
        cap = int(raw)
        if cap < 1:
            raise ValueError(raw)
    except ValueError:
        warnings.warn(
            f"{THREADS_ENV}={raw!r} is not a positive integer; running single-threaded.",
            UserWarning,
        )
        return 1
    return min(cap, available)


def create_pool(workers: Optional[int] = None) -> BasePoolImpl:
    """Pick the serial or threaded implementation for the resolved worker count."""
    count = resolve_workers(workers)
    logger.debug("Monte Carlo pool with %d worker(s)", count)
    if count == 1:
        return SerialPoolImpl()
    return ThreadPoolImpl(count)


__all__ = ["BasePoolImpl", "Block", "SerialPoolImpl", "ThreadPoolImpl", "create_pool", "resolve_workers"]
