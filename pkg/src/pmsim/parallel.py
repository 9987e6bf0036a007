"""Order-preserving parallel map; output never depends on the worker count."""

from concurrent.futures import ProcessPoolExecutor


def pmap(fn, items, jobs: int = 1) -> list:
    items = list(items)
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))
