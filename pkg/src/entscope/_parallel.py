import os
from concurrent.futures import ThreadPoolExecutor


def worker_count() -> int:
    """Worker cap from ``ENTSCOPE_THREADS`` (defaults to the CPU count)."""
    cpus = os.cpu_count() or 1
    raw = os.environ.get("ENTSCOPE_THREADS")
    if raw is None:
        return cpus
    try:
        return max(1, min(cpus, int(raw)))
    except ValueError:
        return cpus


def ordered_map(fn, items):
    """``list(map(fn, items))``, threaded when more than one worker is allowed.

    Results always come back in input order, so merges downstream are
    independent of scheduling.
    """
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))
