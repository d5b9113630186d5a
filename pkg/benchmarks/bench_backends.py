"""Benchmark the numba kernels against the pure-numpy fallback.

Times the two hot kernels behind the public API: the self-normalized profile
over all admissible splits (``sn_profile``) and the max-over-random-intervals
scan used by wild binary segmentation (``interval_scan``).  Run with::

    python3 benchmarks/bench_backends.py [--n 200] [--p 100] [--repeat 5]

The numba timings exclude the first (compilation) call.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from snchange.backend import kernels, set_backend
from snchange.estimate import draw_intervals


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench(n: int, p: int, orders: tuple[int, ...], m_intervals: int,
          repeat: int, seed: int) -> None:
    rng = np.random.default_rng(seed)
    y = np.ascontiguousarray(rng.standard_normal((n, p)))

    print(f"n={n} p={p} intervals={m_intervals} (best of {repeat})")
    header = f"{'kernel':<22}{'q':>3}{'numpy':>12}{'numba':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for q in orders:
        ivs = draw_intervals(n, m_intervals, 4 * q - 1, seed=seed)
        starts = np.array([iv.s - 1 for iv in ivs], dtype=np.int64)
        ends = np.array([iv.e for iv in ivs], dtype=np.int64)
        row = {}
        for backend in ("numpy", "numba"):
            try:
                set_backend(backend)
            except (ImportError, ValueError):
                row[backend] = None
                continue
            kern = kernels()
            kern.sn_profile(y, q)  # warm up (numba compiles here)
            kern.interval_scan(y, q, starts, ends)
            row[backend] = (
                _time(lambda: kern.sn_profile(y, q), repeat),
                _time(lambda: kern.interval_scan(y, q, starts, ends), repeat),
            )
        for idx, name in enumerate(("sn_profile", "interval_scan")):
            np_t = row["numpy"][idx] if row["numpy"] else float("nan")
            nb_t = row["numba"][idx] if row["numba"] else float("nan")
            speedup = np_t / nb_t if nb_t else float("nan")
            print(f"{name:<22}{q:>3}{np_t * 1e3:>10.2f}ms{nb_t * 1e3:>10.2f}ms"
                  f"{speedup:>9.1f}x")
    set_backend(None)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=200)
    parser.add_argument("--p", type=int, default=100)
    parser.add_argument("--q", type=int, nargs="+", default=[2, 6])
    parser.add_argument("--intervals", type=int, default=100)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    bench(args.n, args.p, tuple(args.q), args.intervals, args.repeat, args.seed)


if __name__ == "__main__":
    main()
