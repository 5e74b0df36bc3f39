#!/usr/bin/env python3
"""Benchmark: compiled CVaR kernels vs the pure-NumPy fallback.

Times the workloads that dominate the experiment harness and the oracle:
small per-step batch CVaR/VaR (called once per learner step and once per
bound trial) and the weighted row sweep used by the grid oracle. Run after
building the extension:

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from cvarlearn import _kernels_py as pyk

try:
    from cvarlearn import _kernels as cyk
except ImportError:
    cyk = None


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(5):
        t0 = time.perf_counter()
        for _ in range(repeats):
            fn()
        best = min(best, (time.perf_counter() - t0) / repeats)
    return best


def fmt(seconds):
    if seconds < 1e-6:
        return f"{seconds * 1e9:7.1f} ns"
    if seconds < 1e-3:
        return f"{seconds * 1e6:7.1f} us"
    return f"{seconds * 1e3:7.1f} ms"


def main():
    rng = np.random.default_rng(0)
    small = np.ascontiguousarray(np.sort(rng.normal(0, 1, 8)))
    medium = np.ascontiguousarray(np.sort(rng.normal(0, 1, 10_000)))
    qcosts = np.ascontiguousarray(rng.normal(0, 1, 1025))
    qw = rng.uniform(0.5, 1.0, 1025)
    qw = np.ascontiguousarray(qw / qw.sum())
    grid = np.ascontiguousarray(rng.normal(0, 1, (1001, 1025)))

    cases = [
        ("cvar_sorted, n=8 (per learner step)",
         lambda k: k.cvar_sorted(small, 0.5), 20_000),
        ("var_sorted, n=8 (per learner step)",
         lambda k: k.var_sorted(small, 0.5), 20_000),
        ("cvar_sorted, n=10000 (gradient-consistency batches)",
         lambda k: k.cvar_sorted(medium, 0.5), 2_000),
        ("cvar_weighted, q=1025 (one oracle evaluation)",
         lambda k: k.cvar_weighted(qcosts, qw, 0.5), 2_000),
        ("cvar_weighted_rows, 1001x1025 (one oracle grid stage)",
         lambda k: k.cvar_weighted_rows(grid, qw, 0.5), 5),
    ]

    print(f"{'workload':55s} {'python':>12s} {'cython':>12s} {'speedup':>9s}")
    for name, fn, repeats in cases:
        t_py = timeit(lambda: fn(pyk), repeats)
        if cyk is None:
            print(f"{name:55s} {fmt(t_py):>12s} {'(no ext)':>12s}")
            continue
        t_cy = timeit(lambda: fn(cyk), repeats)
        print(f"{name:55s} {fmt(t_py):>12s} {fmt(t_cy):>12s} {t_py / t_cy:8.1f}x")


if __name__ == "__main__":
    main()
