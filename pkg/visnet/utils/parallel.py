"""
Ordered fan-out over concurrent.futures
Results always come back in input order so aggregates stay deterministic.
"""

from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

from ..config import settings

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(workers: int | None) -> int:
    """`None` means the configured cap (VISNET_WORKERS)."""
    if workers is None:
        workers = settings.workers
    return max(1, int(workers))


def ordered_map(
    fn: Callable[[T], R],
    items: Iterable[T],
    workers: int | None = None,
    processes: bool = False,
) -> list[R]:
    """
    Apply `fn` to every item, possibly concurrently.

    Args:
        fn: Work function; must be a module-level callable when `processes`
        items: Inputs, consumed eagerly
        workers: Pool size; 1 runs inline in the caller's thread
        processes: Use a process pool (CPU-bound pure Python work)

    Returns:
        List of results in the order of `items`
    """
    batch = list(items)
    count = min(resolve_workers(workers), len(batch))
    if count <= 1:
        return [fn(item) for item in batch]

    pool_cls = ProcessPoolExecutor if processes else ThreadPoolExecutor
    with pool_cls(max_workers=count) as pool:
        return list(pool.map(fn, batch))
