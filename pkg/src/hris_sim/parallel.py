"""Trial scheduling over a bounded worker pool.

Trials are independent by construction (each derives its own random stream
from its index), so results are collected in trial order and the output of a
run does not depend on how many workers executed it.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor


def map_trials(fn, n_trials: int, workers: int = 1) -> list:
    """Evaluate fn(0..n_trials-1), in order, optionally on a process pool."""
    if workers is None or workers <= 1 or n_trials <= 1:
        return [fn(t) for t in range(n_trials)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunk = max(1, n_trials // (workers * 4))
        return list(pool.map(fn, range(n_trials), chunksize=chunk))
