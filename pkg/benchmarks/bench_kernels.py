"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from cubical import kernels
from cubical.generators import fixture, grid, named_graph, salvetti_ball


def workloads():
    big = grid(9, 9)
    ball, _ = salvetti_ball(named_graph("path-abc"), 2)
    for C in (big, ball, fixture("salvetti_ball(free-ab,3)")):
        indptr, indices = C.csr
        D = C.dist
        seeds = [0, C.n - 1]
        removed = D[0] <= 1
        yield C.name, "all_pairs_distances", lambda C=C: kernels.all_pairs_distances(C.n, C.adjacency)
        yield C.name, "median_scan", lambda D=D: kernels.median_scan(D)
        yield C.name, "interval_closure", lambda D=D, s=seeds: kernels.interval_closure(D, s)
        yield C.name, "components_without", (
            lambda C=C, p=indptr, i=indices, r=removed: kernels.components_without(C.n, p, i, r))


def timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    rows = []
    for name, op, fn in workloads():
        times = {}
        for backend in ("cython", "python"):
            try:
                kernels.use_backend(backend)
            except ImportError:
                times[backend] = None
                continue
            times[backend] = timed(fn, args.repeat)
        rows.append((name, op, times["cython"], times["python"]))
    kernels.use_backend("cython" if rows[0][2] is not None else "python")
    print(f"{'complex':28} {'kernel':20} {'cython s':>10} {'python s':>10} {'speedup':>8}")
    for name, op, c, p in rows:
        speed = f"{p / c:8.1f}" if c else "     n/a"
        cs = f"{c:10.4f}" if c is not None else "       n/a"
        print(f"{name:28} {op:20} {cs} {p:10.4f} {speed}")


if __name__ == "__main__":
    main()
