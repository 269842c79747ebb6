"""Time the jitted kernels against their pure-numpy fallbacks.

Run twice to compare the paths:

    python3 benchmarks/kernels.py                # numba path (default)
    MONOGRID_NUMBA=0 python3 benchmarks/kernels.py   # numpy fallback

The dispatcher reads MONOGRID_NUMBA once at import, so each run times one
path; results print as a small table.
"""

import time

import numpy as np

from monogrid import _accel


def _bench(label, fn, *args, repeat=5):
    fn(*args)  # warm-up (jit compilation on the numba path)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    print(f"{label:34s} {min(times) * 1e3:9.2f} ms")


def main():
    path = "numba" if _accel.NUMBA_ACTIVE else "numpy"
    print(f"kernel path: {path}\n")
    rng = np.random.default_rng(0)

    queries = rng.random((200_000, 3))
    neg = np.sort(rng.random((120, 3)), axis=0)
    pos = 1.0 - neg
    _bench("classify 200k pts vs 2x120 anchors", _accel.classify_batch, queries, neg, pos)

    pool = rng.random((1200, 3))
    _bench("dominance counts, 1200-point pool", _accel.dominance_counts, pool)

    pts = rng.random((243, 5))
    _bench("comparable pairs, 243 points p=5", _accel.comparable_pairs, pts)

    _bench("uniform worst-case sim n=20 x 1e5", _accel.mc_worst1d_volumes, 20, 100_000, 1)
    _bench("rejection sim 5000 tries x 16384", _accel.amc_worst1d_eval_counts, 5000, 16_384, 1)


if __name__ == "__main__":
    main()
