"""
Thread-pool helpers; results always come back in input order
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from .config import THREADS_ENV_VAR
from .exceptions import ConfigValidationError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(requested: Optional[int] = None) -> int:
    """Thread count: PHASECOVER_THREADS wins over the requested value, default 1"""
    raw = os.getenv(THREADS_ENV_VAR)
    if raw:
        try:
            threads = int(raw)
        except ValueError as e:
            raise ConfigValidationError(THREADS_ENV_VAR, f"not an integer: {raw!r}") from e
    else:
        threads = requested or 1
    if threads < 1:
        raise ConfigValidationError(THREADS_ENV_VAR if raw else "threads", f"must be positive, got {threads}")
    return threads


def ordered_map(func: Callable[[T], R], items: Iterable[T], threads: int = 1) -> List[R]:
    """map() over a thread pool, reduced in index order so results never depend on scheduling"""
    items = list(items)
    logger.debug(f"Mapping {len(items)} tasks over {threads} thread(s)")
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))
