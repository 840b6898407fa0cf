"""Benchmark: compiled top-k scan vs the numpy fallback.

Usage: python benchmarks/bench_knn.py [--sizes 1000,10000,100000] [--dim 64]
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from knnloop import _nnkernel_py

try:
    from knnloop import _nnkernel
except ImportError:
    _nnkernel = None


def time_kernel(kernel, keys, queries, k, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        for q in queries:
            kernel(keys, q, k)
        best = min(best, time.perf_counter() - start)
    return best / len(queries)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="1000,10000,100000")
    parser.add_argument("--dim", type=int, default=64)
    parser.add_argument("--k", type=int, default=8)
    parser.add_argument("--queries", type=int, default=200)
    args = parser.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(0)
    queries = [rng.normal(size=args.dim) for _ in range(args.queries)]

    print(f"dim={args.dim} k={args.k} queries={args.queries} (best of 3, per query)")
    header = f"{'entries':>10} {'numpy':>12} {'native':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        keys = rng.normal(size=(n, args.dim))
        numpy_s = time_kernel(_nnkernel_py.topk_l2, keys, queries, args.k)
        if _nnkernel is not None:
            native_s = time_kernel(_nnkernel.topk_l2, keys, queries, args.k)
            ids_a, d_a = _nnkernel.topk_l2(keys, queries[0], args.k)
            ids_b, d_b = _nnkernel_py.topk_l2(keys, queries[0], args.k)
            assert ids_a.tolist() == ids_b.tolist(), "kernels disagree"
            assert np.allclose(d_a, d_b, atol=1e-9)
            print(
                f"{n:>10} {numpy_s * 1e6:>10.1f}us {native_s * 1e6:>10.1f}us "
                f"{numpy_s / native_s:>8.2f}x"
            )
        else:
            print(f"{n:>10} {numpy_s * 1e6:>10.1f}us {'n/a':>12} {'n/a':>9}")
    if _nnkernel is None:
        print("compiled kernel not built; install with `pip install -e .`")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
