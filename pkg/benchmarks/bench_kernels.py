"""Compare the numba and pure-numpy kernel backends on the hot paths.

Run:
    python benchmarks/bench_kernels.py

Both backends are imported directly (no env flag needed), timed on the
workloads that dominate the test suite and the teaching loop: logistic
descent fits and margin-feasibility LP solves.
"""

from __future__ import annotations

import time

import numpy as np

from teachbench._kernels import numba_impl, numpy_impl

BACKENDS = (("numba", numba_impl), ("numpy", numpy_impl))


def logreg_workload(rng):
    cases = []
    for _ in range(20):
        n = int(rng.integers(8, 51))
        p = int(rng.integers(1, 6))
        X = rng.normal(size=(n, p))
        y = (X[:, 0] + 0.3 * rng.normal(size=n) > 0).astype(np.float64)
        cases.append((X, y, float(rng.choice([0.0, 1.0]))))
    return cases


def lp_workload(rng):
    cases = []
    for _ in range(200):
        m = int(rng.integers(3, 14))
        k = int(rng.integers(2, 5))
        cases.append(np.round(rng.normal(size=(m, k)) * 2.0))
    return cases


def time_backend(label, impl, logreg_cases, lp_cases):
    # warm-up triggers jit compilation so steady-state cost is measured
    impl.logreg_gd(logreg_cases[0][0], logreg_cases[0][1], 0.0, 100, 1e-8)
    impl.margin_lp(lp_cases[0], 1e-9, 10_000)

    start = time.perf_counter()
    for X, y, lam in logreg_cases:
        impl.logreg_gd(X, y, lam, 10_000, 1e-8)
    logreg_s = time.perf_counter() - start

    start = time.perf_counter()
    for A in lp_cases:
        impl.margin_lp(A, 1e-9, 10_000)
    lp_s = time.perf_counter() - start
    return logreg_s, lp_s


def main() -> None:
    rng = np.random.default_rng(0)
    logreg_cases = logreg_workload(rng)
    lp_cases = lp_workload(rng)

    results = {}
    for label, impl in BACKENDS:
        results[label] = time_backend(label, impl, logreg_cases, lp_cases)

    print(f"{'backend':<8} {'logreg fits (20x)':>18} {'margin LPs (200x)':>18}")
    for label, (logreg_s, lp_s) in results.items():
        print(f"{label:<8} {logreg_s:>16.3f}s {lp_s:>16.3f}s")
    nb, py = results["numba"], results["numpy"]
    print(
        f"\nspeedup: logreg {py[0] / nb[0]:.1f}x, margin LP {py[1] / nb[1]:.1f}x"
    )


if __name__ == "__main__":
    main()
