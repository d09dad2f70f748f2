"""Replication fan-out with an order-fixed reduction.

Work is split into contiguous replication ranges. Each replication owns its
random stream, so the concatenated per-replication results (and any reduction
over them) do not depend on the number of workers or on completion order.
"""

from concurrent.futures import ProcessPoolExecutor

import numpy as np


def chunk_ranges(n_items: int, n_chunks: int):
    n_chunks = max(1, min(n_chunks, n_items))
    edges = np.linspace(0, n_items, n_chunks + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def map_replications(func, n_reps: int, jobs: int, *args):
    """Run ``func(*args, start, stop)`` over replication ranges and concatenate.

    ``func`` must be a module-level function returning arrays (or a tuple of
    arrays) whose leading axis is the replication index.
    """
    if jobs <= 1:
        parts = [func(*args, a, b) for a, b in chunk_ranges(n_reps, 1)]
    else:
        ranges = chunk_ranges(n_reps, 4 * jobs)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(func, *args, a, b) for a, b in ranges]
            parts = [f.result() for f in futures]
    if isinstance(parts[0], tuple):
        return tuple(np.concatenate([p[i] for p in parts]) for i in range(len(parts[0])))
    return np.concatenate(parts)


def mean_halfwidth(samples, z: float = 1.959963984540054):
    """Sample mean and normal-approximation 95% half-width along axis 0."""
    samples = np.asarray(samples, dtype=np.float64)
    mean = samples.mean(axis=0)
    if samples.shape[0] < 2:
        return mean, np.full_like(mean, np.nan)
    se = samples.std(axis=0, ddof=1) / np.sqrt(samples.shape[0])
    return mean, z * se
