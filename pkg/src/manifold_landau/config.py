"""Worker-count configuration and deterministic chunked reductions.

Grid scans may be partitioned across a thread pool; the reduction is
written so the result is bit-identical to a sequential scan (ties in an
extremum are broken by smallest t).
"""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

THREADS_ENV_VAR = "MANIFOLD_LANDAU_THREADS"


def worker_count() -> int:
    """Number of scan workers: MANIFOLD_LANDAU_THREADS or available cores."""
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        return os.cpu_count() or 1
    return max(1, n)


def chunked_extremum(values_fn, ts: np.ndarray, mode: str = "max"):
    """Evaluate values_fn over ts (possibly in parallel chunks) and locate
    the extremum.

    Returns (t_star, value_star, values) where values is the full array in
    grid order. Ties are broken by smallest t regardless of chunking.
    """
    n = len(ts)
    workers = min(worker_count(), max(1, n // 512))
    if workers <= 1:
        values = np.asarray(values_fn(ts), dtype=float)
    else:
        bounds = np.linspace(0, n, workers + 1).astype(int)
        chunks = [ts[lo:hi] for lo, hi in zip(bounds[:-1], bounds[1:])]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: np.asarray(values_fn(c), dtype=float), chunks))
        values = np.concatenate(parts)
    if mode == "max":
        idx = int(np.argmax(values))  # argmax returns the first (smallest t)
    else:
        idx = int(np.argmin(values))
    return float(ts[idx]), float(values[idx]), values
