"""Query benchmark harness: random member queries, shuffled, timed in
batches over several runs after a warm-up."""

import time

import numpy as np
from numba import njit

from .dictionary import StringDictionary
from .mph import MonotoneHash

DEFAULT_QUERIES = 1_000_000
DEFAULT_RUNS = 10


@njit(cache=True)
def _gather(buf, offsets, ids, out, qoffs):
    w = 0
    qoffs[0] = 0
    for k in range(ids.shape[0]):
        i = ids[k]
        for p in range(offsets[i], offsets[i + 1]):
            out[w] = buf[p]
            w += 1
        qoffs[k + 1] = w


def member_queries(buf, offsets, n=DEFAULT_QUERIES, seed=0):
    """n random (and randomly shuffled) member strings as a query batch."""
    rng = np.random.default_rng(seed)
    ids = rng.integers(0, offsets.shape[0] - 1, n)
    lens = offsets[ids + 1] - offsets[ids]
    out = np.empty(int(lens.sum()), dtype=np.uint8)
    qoffs = np.empty(n + 1, dtype=np.int64)
    _gather(buf, offsets, ids, out, qoffs)
    return out, qoffs


def bench_queries(obj, qbuf, qoffs, runs=DEFAULT_RUNS, warmup=1):
    """Mean and standard deviation of per-query latency in microseconds."""
    if isinstance(obj, StringDictionary):
        run = lambda: obj.lookup_batch(qbuf, qoffs)
    elif isinstance(obj, MonotoneHash):
        run = lambda: obj.hash_batch(qbuf, qoffs)
    else:
        raise TypeError("unsupported structure for bench")
    for _ in range(warmup):
        run()
    n = qoffs.shape[0] - 1
    times = []
    for _ in range(runs):
        t0 = time.perf_counter()
        run()
        times.append((time.perf_counter() - t0) / n * 1e6)
    times = np.array(times)
    return {
        "queries": n,
        "runs": runs,
        "mean_us": float(times.mean()),
        "std_us": float(times.std()),
    }
