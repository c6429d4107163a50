"""Bounded thread pool; results come back in submission order."""
import os
from concurrent.futures import ThreadPoolExecutor

ENV_VAR = "EDC_NUM_WORKERS"


def num_workers(requested: int | None = None) -> int:
    cap = os.environ.get(ENV_VAR)
    n = requested or os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def pool_map(fn, items, workers: int | None = None) -> list:
    items = list(items)
    n = min(num_workers(workers), max(1, len(items)))
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))
