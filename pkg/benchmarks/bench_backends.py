"""Timing comparison between the pure-Python and compiled kernel backends.

Run from the repository root after installing the package:

    python benchmarks/bench_backends.py [--n 10] [--trials 10]

Reports per-kernel and end-to-end reduction timings plus the speedup.
The same numbers are available via ``hetda bench``.
"""

from __future__ import annotations

import argparse
import time
import warnings

import numpy as np

from hetda import CompParams, LowParams, phi_optimal
from hetda import _backend
from hetda.harness import sample_matrix
from hetda.reduction import he_reduce_optimized
from hetda.tracking import OpCounter


def time_kernels(impl, n: int, repeats: int = 200) -> dict[str, float]:
    counter = OpCounter()
    vals = np.linspace(0.0, 1.0, n)
    levs = np.zeros(n, dtype=np.int64)
    timings = {}
    start = time.perf_counter()
    for _ in range(repeats):
        impl.low_vec(vals, levs, 3, 3, 2, 6, counter)
    timings["low"] = (time.perf_counter() - start) / repeats
    start = time.perf_counter()
    for _ in range(repeats):
        impl.lowcomp_scalar(2.0, 0, 7.0, 0, 0.51, n, 3, 3, 2, 12, counter)
    timings["lowcomp"] = (time.perf_counter() - start) / repeats
    return timings


def time_reduction(backend: str, n: int, trials: int) -> float:
    pl = LowParams(3, 3, 2, 6)
    pc = CompParams(3, 3, 2, 12, phi=phi_optimal(n, 0.2))
    start = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for index in range(trials):
            matrix = sample_matrix(n, 0.5, 1234, index)
            he_reduce_optimized(matrix, pl, pc, backend=backend)
    return (time.perf_counter() - start) / trials


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=10)
    parser.add_argument("--trials", type=int, default=10)
    args = parser.parse_args()

    backends = ["pure"] + (["compiled"] if _backend.compiled_available() else [])
    print(f"n = {args.n}, trials = {args.trials}, active backend = {_backend.name()}")
    per_reduction = {}
    for name in backends:
        impl = _backend.get(name)
        kernel_times = time_kernels(impl, args.n)
        per_reduction[name] = time_reduction(name, args.n, args.trials)
        print(
            f"{name:>9}:  low {kernel_times['low'] * 1e6:9.1f} us   "
            f"lowcomp {kernel_times['lowcomp'] * 1e6:9.1f} us   "
            f"full reduction {per_reduction[name] * 1e3:9.2f} ms"
        )
    if "compiled" in per_reduction:
        print(f"  speedup (full reduction): {per_reduction['pure'] / per_reduction['compiled']:.1f}x")
    else:
        print("  compiled backend not built; only the pure backend was timed")


if __name__ == "__main__":
    main()
