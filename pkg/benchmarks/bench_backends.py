#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure NumPy fallback.

Times the three hot kernels on experiment-scale inputs (n = 1000 products,
M = 20 slots, the regime of the offline benchmark) plus a full greedy fill.

Usage: python benchmarks/bench_backends.py [--repeats 50]
"""

import argparse
import time

import numpy as np

from rankcascade import _kernels_py

try:
    from rankcascade import _kernels
except ImportError:
    _kernels = None

TOL = 1e-12


def make_instance(rng, n):
    prices = np.sort(rng.uniform(0.0, 10.0, n))[::-1].copy()
    lams = np.sort(rng.uniform(1e-4, 0.5, n))
    return lams, prices


def bench_dp(mod, lam, r, M, repeats):
    a, b = lam * r, 1.0 - lam
    t0 = time.perf_counter()
    for _ in range(repeats):
        mod.dp_tableau(a, b, M, TOL)
    return (time.perf_counter() - t0) / repeats


def bench_assortopt(mod, lam, r, M, repeats):
    t0 = time.perf_counter()
    for _ in range(repeats):
        mod.assortopt_steps(lam, r, M, TOL)
    return (time.perf_counter() - t0) / repeats


def bench_greedy_fill(mod, lam, r, M, repeats):
    G = np.array([1.0 - x / M for x in range(M)])
    lr = lam * r
    t0 = time.perf_counter()
    for _ in range(repeats):
        current = []
        pool = np.arange(lam.shape[0], dtype=np.int64)
        while len(current) < M:
            cur = np.asarray(current, dtype=np.int64)
            _, ci, pos = mod.best_insertion(
                lam[cur], lr[cur], G, lam[pool], lr[pool], TOL
            )
            current.insert(pos, int(pool[ci]))
            pool = np.delete(pool, ci)
    return (time.perf_counter() - t0) / repeats


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=50)
    parser.add_argument("--n", type=int, default=1000)
    parser.add_argument("--m", type=int, default=20)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    lam, r = make_instance(rng, args.n)

    backends = [("python", _kernels_py)]
    if _kernels is not None:
        backends.append(("compiled", _kernels))
    else:
        print("compiled kernels not available; timing the fallback only\n")

    cases = [
        ("dp_tableau     ", bench_dp),
        ("assortopt_steps", bench_assortopt),
        ("greedy_fill    ", bench_greedy_fill),
    ]
    results = {}
    for name, mod in backends:
        for case, fn in cases:
            results[(name, case)] = fn(mod, lam, r, args.m, args.repeats)

    print(f"n={args.n}, M={args.m}, {args.repeats} repeats (mean per call)\n")
    header = f"{'kernel':<18}" + "".join(f"{name:>14}" for name, _ in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for case, _ in cases:
        row = f"{case:<18}"
        for name, _ in backends:
            row += f"{results[(name, case)] * 1e3:>12.3f}ms"
        if len(backends) == 2:
            row += f"{results[('python', case)] / results[('compiled', case)]:>9.1f}x"
        print(row)

    if len(backends) == 2:
        va, aa = _kernels.assortopt_steps(lam, r, args.m, TOL)
        vb, ab = _kernels_py.assortopt_steps(lam, r, args.m, TOL)
        assert np.array_equal(aa, ab) and np.array_equal(va, vb)
        print("\nbackends agree exactly on this instance")


if __name__ == "__main__":
    main()
