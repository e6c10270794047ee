#!/usr/bin/env python3
"""Benchmark the finite-field kernels: numba @njit vs the pure-numpy fallback.

Runs each workload under both backends (TSF_PURE_NUMPY toggles the fallback)
and prints a comparison table, plus the exact sparse-python reference where
it is feasible.  Results are wall-clock medians of repeated runs; the first
numba call is warmed up separately so JIT compilation is not billed.

Usage: python3 benchmarks/bench_kernels.py
"""

import os
import statistics
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

import numpy as np

from tensorspaces import kernels
from tensorspaces.fields import PrimeField
from tensorspaces.forms import random_lambda_space
from tensorspaces.linalg import enumerate_gl
from tensorspaces.partitions import Partition, PartitionTuple

import random

F5 = PrimeField(5)
T3 = PartitionTuple([Partition((3,))])


def timed(fn, repeats=5):
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def with_backend(name, fn):
    old = os.environ.get("TSF_PURE_NUMPY")
    os.environ["TSF_PURE_NUMPY"] = "1" if name == "numpy" else "0"
    try:
        assert kernels.backend() == name, f"backend {name} unavailable"
        return fn()
    finally:
        if old is None:
            os.environ.pop("TSF_PURE_NUMPY", None)
        else:
            os.environ["TSF_PURE_NUMPY"] = old


def bench_gl_enumeration():
    results = {}
    for backend in ("numba", "numpy"):
        with_backend(backend, lambda: kernels.gl_matrices(3, 5))  # warm-up
        results[backend] = with_backend(
            backend, lambda: timed(lambda: kernels.gl_matrices(3, 5))
        )
    results["python-exact"] = timed(
        lambda: sum(1 for _ in enumerate_gl(3, F5)), repeats=1
    )
    return "GL(3, F5) enumeration (372000 matrices)", results


def bench_iso_search():
    rng = random.Random(0)
    a = random_lambda_space(T3, 3, F5, rng)
    b = random_lambda_space(T3, 3, F5, rng)  # almost surely not isomorphic

    results = {}
    for backend in ("numba", "numpy"):
        with_backend(backend, lambda: kernels.iso_search_dense(a, b))  # warm-up
        results[backend] = with_backend(
            backend, lambda: timed(lambda: kernels.iso_search_dense(a, b), repeats=3)
        )
    return "cubic iso search, full GL(3, F5) sweep (no match)", results


def bench_batch_pullback():
    rng = random.Random(1)
    a = random_lambda_space(T3, 3, F5, rng)
    dense = kernels.dense_from_form(a.forms[0].canonical)
    mats = kernels.gl_matrices(3, 5)[:20000]

    def run_numpy_batch():
        kernels.batch_pullback(dense, mats, 5)

    def run_numba_loop():
        fns = kernels._numba_fns()["peq"]
        target = kernels.pullback_dense(dense, np.eye(3, dtype=np.int64), 5)
        hits = 0
        for t in range(len(mats)):
            if fns[3](dense, mats[t], target, 5):
                hits += 1
        return hits

    results = {}
    with_backend("numba", run_numba_loop)  # warm-up
    results["numba"] = with_backend("numba", lambda: timed(run_numba_loop, repeats=3))
    results["numpy"] = with_backend("numpy", lambda: timed(run_numpy_batch, repeats=3))
    return "20000 pullback comparisons of a dense cubic form", results


def main():
    print(f"default backend: {kernels.backend()}")
    rows = []
    for bench in (bench_gl_enumeration, bench_iso_search, bench_batch_pullback):
        label, results = bench()
        rows.append((label, results))
    print()
    print(f"{'workload':<55} " + " ".join(f"{k:>14}" for k in ("numba", "numpy", "python-exact")))
    for label, results in rows:
        cells = []
        for key in ("numba", "numpy", "python-exact"):
            if key in results:
                cells.append(f"{results[key] * 1000:>12.1f}ms")
            else:
                cells.append(f"{'-':>14}")
        print(f"{label:<55} " + " ".join(cells))


if __name__ == "__main__":
    main()
