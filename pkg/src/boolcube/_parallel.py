"""Ordered map over a process pool; results always come back in input order."""
import os
from concurrent.futures import ProcessPoolExecutor

WORKERS_ENV = "BOOLCUBE_WORKERS"


def default_workers():
    value = os.environ.get(WORKERS_ENV, "").strip()
    if not value:
        return 1
    try:
        workers = int(value)
    except ValueError:
        raise ValueError(f"{WORKERS_ENV} must be an integer, got {value!r}") from None
    return max(1, workers)


def ordered_map(func, items, workers=1):
    items = list(items)
    if workers is None:
        workers = default_workers()
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(func, items))
