"""Hot numeric kernels: numba-jitted fast paths with pure-numpy fallbacks.

The jitted path is the default. Set ``MONOGRID_NUMBA=0`` in the environment
to force the numpy implementations (handy when debugging, on platforms
without numba, or when timing the two paths against each other; see
``benchmarks/kernels.py``). Both paths compute identical results except for
the replicate simulators, which draw from different RNG streams.
"""

from __future__ import annotations

import os

import numpy as np

_flag = os.environ.get("MONOGRID_NUMBA", "1").strip().lower()
NUMBA_REQUESTED = _flag not in ("0", "false", "off", "no")

if NUMBA_REQUESTED:
    try:
        import numba

        NUMBA_ACTIVE = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ACTIVE = False
else:
    NUMBA_ACTIVE = False


# ---------------------------------------------------------------------------
# pure-numpy implementations
# ---------------------------------------------------------------------------

_CHUNK = 1 << 15  # rows per broadcast block, keeps memory bounded


def _classify_batch_np(queries, neg_frontier, pos_frontier):
    n = queries.shape[0]
    out = np.zeros(n, dtype=np.int8)
    for start in range(0, n, _CHUNK):
        block = queries[start : start + _CHUNK]
        neg_hit = np.zeros(block.shape[0], dtype=bool)
        pos_hit = np.zeros(block.shape[0], dtype=bool)
        if neg_frontier.shape[0]:
            neg_hit = (block[:, None, :] <= neg_frontier[None, :, :]).all(axis=2).any(axis=1)
        if pos_frontier.shape[0]:
            pos_hit = (block[:, None, :] >= pos_frontier[None, :, :]).all(axis=2).any(axis=1)
        seg = out[start : start + _CHUNK]
        seg[neg_hit] = -1
        seg[pos_hit] = 1
        seg[neg_hit & pos_hit] = 2  # conflict, caller raises
    return out


def _dominance_counts_np(points):
    n = points.shape[0]
    below = np.zeros(n, dtype=np.int64)
    above = np.zeros(n, dtype=np.int64)
    for start in range(0, n, _CHUNK):
        block = points[start : start + _CHUNK]
        leq = (points[None, :, :] <= block[:, None, :]).all(axis=2)
        geq = (points[None, :, :] >= block[:, None, :]).all(axis=2)
        below[start : start + _CHUNK] = leq.sum(axis=1)
        above[start : start + _CHUNK] = geq.sum(axis=1)
    return below, above


def _comparable_pairs_np(points):
    below, _ = _dominance_counts_np(points)
    n = points.shape[0]
    # each unordered comparable pair {x, y}, x != y, is counted once in
    # below[] of its upper element; equal points are comparable both ways
    total = int(below.sum()) - n
    # equal rows were double counted (x <= y and y <= x); correct by pairing
    eq = (points[None, :, :] == points[:, None, :]).all(axis=2)
    dup = int(eq.sum()) - n
    return total - dup // 2


def _mc_worst1d_vols_np(n_runs, n_reps, seed):
    rng = np.random.default_rng(seed)
    x = rng.random((n_reps, n_runs))
    neg = np.where(x < 0.5, x, 0.0)
    pos = np.where(x >= 0.5, x, 1.0)
    return pos.min(axis=1) - neg.max(axis=1)


def _amc_worst1d_counts_np(n_tries, n_reps, seed):
    rng = np.random.default_rng(seed)
    lo = np.zeros(n_reps)
    hi = np.ones(n_reps)
    m = np.zeros(n_reps, dtype=np.int64)
    for _ in range(n_tries):
        u = rng.random(n_reps)
        accept = (u > lo) & (u < hi)
        m += accept
        lo = np.where(accept & (u < 0.5), u, lo)
        hi = np.where(accept & (u >= 0.5), u, hi)
    return m


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if NUMBA_ACTIVE:

    @numba.njit(cache=True)
    def _classify_batch_nb(queries, neg_frontier, pos_frontier):
        n, p = queries.shape
        out = np.zeros(n, dtype=np.int8)
        for i in range(n):
            neg_hit = False
            for j in range(neg_frontier.shape[0]):
                ok = True
                for k in range(p):
                    if queries[i, k] > neg_frontier[j, k]:
                        ok = False
                        break
                if ok:
                    neg_hit = True
                    break
            pos_hit = False
            for j in range(pos_frontier.shape[0]):
                ok = True
                for k in range(p):
                    if queries[i, k] < pos_frontier[j, k]:
                        ok = False
                        break
                if ok:
                    pos_hit = True
                    break
            if neg_hit and pos_hit:
                out[i] = 2
            elif neg_hit:
                out[i] = -1
            elif pos_hit:
                out[i] = 1
        return out

    @numba.njit(cache=True)
    def _dominance_counts_nb(points):
        n, p = points.shape
        below = np.zeros(n, dtype=np.int64)
        above = np.zeros(n, dtype=np.int64)
        for i in range(n):
            for j in range(n):
                leq = True
                geq = True
                for k in range(p):
                    if points[j, k] > points[i, k]:
                        leq = False
                    if points[j, k] < points[i, k]:
                        geq = False
                    if not leq and not geq:
                        break
                if leq:
                    below[i] += 1
                if geq:
                    above[i] += 1
        return below, above

    @numba.njit(cache=True)
    def _comparable_pairs_nb(points):
        n, p = points.shape
        count = 0
        for i in range(n):
            for j in range(i + 1, n):
                leq = True
                geq = True
                for k in range(p):
                    if points[i, k] > points[j, k]:
                        leq = False
                    if points[i, k] < points[j, k]:
                        geq = False
                    if not leq and not geq:
                        break
                if leq or geq:
                    count += 1
        return count

    @numba.njit(cache=True)
    def _mc_worst1d_vols_nb(n_runs, n_reps, seed):
        np.random.seed(seed)
        vols = np.empty(n_reps)
        for r in range(n_reps):
            lo = 0.0
            hi = 1.0
            for _ in range(n_runs):
                u = np.random.random()
                if u < 0.5:
                    if u > lo:
                        lo = u
                else:
                    if u < hi:
                        hi = u
            vols[r] = hi - lo
        return vols

    @numba.njit(cache=True)
    def _amc_worst1d_counts_nb(n_tries, n_reps, seed):
        np.random.seed(seed)
        m = np.zeros(n_reps, dtype=np.int64)
        for r in range(n_reps):
            lo = 0.0
            hi = 1.0
            for _ in range(n_tries):
                u = np.random.random()
                if lo < u < hi:
                    m[r] += 1
                    if u < 0.5:
                        lo = u
                    else:
                        hi = u
        return m


# ---------------------------------------------------------------------------
# public dispatch
# ---------------------------------------------------------------------------


def classify_batch(queries, neg_frontier, pos_frontier):
    """Classify query rows against dominance frontiers.

    Returns an int8 array: -1 dominated by a negative anchor, +1 dominating
    a positive anchor, 0 neither, 2 both (inconsistent state).
    """
    queries = np.ascontiguousarray(queries, dtype=np.float64)
    neg_frontier = np.ascontiguousarray(neg_frontier, dtype=np.float64)
    pos_frontier = np.ascontiguousarray(pos_frontier, dtype=np.float64)
    if NUMBA_ACTIVE:
        return _classify_batch_nb(queries, neg_frontier, pos_frontier)
    return _classify_batch_np(queries, neg_frontier, pos_frontier)


def dominance_counts(points):
    """Per-row counts of rows componentwise <= and >= it (self included)."""
    points = np.ascontiguousarray(points, dtype=np.float64)
    if NUMBA_ACTIVE:
        return _dominance_counts_nb(points)
    return _dominance_counts_np(points)


def comparable_pairs(points):
    """Number of unordered pairs {x, y}, x != y, comparable componentwise."""
    points = np.ascontiguousarray(points, dtype=np.float64)
    if points.shape[0] < 2:
        return 0
    if NUMBA_ACTIVE:
        return int(_comparable_pairs_nb(points))
    return int(_comparable_pairs_np(points))


def mc_worst1d_volumes(n_runs, n_reps, seed):
    """Replicated uncertain lengths for n uniform draws against the midpoint
    step function on [0, 1] (negative strictly below 1/2)."""
    if NUMBA_ACTIVE:
        return _mc_worst1d_vols_nb(n_runs, n_reps, seed & 0x7FFFFFFF)
    return _mc_worst1d_vols_np(n_runs, n_reps, seed)


def amc_worst1d_eval_counts(n_tries, n_reps, seed):
    """Replicated evaluation counts for rejection sampling against the
    midpoint step function: n_tries uniform proposals per replicate, only
    proposals inside the open uncertain interval are evaluated."""
    if NUMBA_ACTIVE:
        return _amc_worst1d_counts_nb(n_tries, n_reps, seed & 0x7FFFFFFF)
    return _amc_worst1d_counts_np(n_tries, n_reps, seed)
