"""Benchmark the compiled kernels against the pure numpy fallback.

Times the CSR matvec and the fused Chebyshev recurrence on a banded
random matrix. Run after building the extension:

    python benchmarks/bench_kernels.py [--n 200000] [--band 8] [--degree 50]
"""

import argparse
import time

import numpy as np

from specrank import _kernels_py
from specrank.linops import SparseSymmetric, gershgorin_range
from specrank.probe import ProbeConfig, probe_vector

try:
    from specrank import _kernels

    HAVE_COMPILED = True
except ImportError:
    _kernels = None
    HAVE_COMPILED = False


def banded_operator(n, band, seed=0):
    rng = np.random.Generator(np.random.Philox(key=[seed, 0]))
    rows = [np.arange(n, dtype=np.int64)]
    cols = [np.arange(n, dtype=np.int64)]
    vals = [rng.standard_normal(n) + band + 1.0]
    for off in range(1, band + 1):
        idx = np.arange(n - off, dtype=np.int64)
        v = rng.standard_normal(n - off) * 0.5
        rows += [idx, idx + off]
        cols += [idx + off, idx]
        vals += [v, v]
    return SparseSymmetric(n, np.concatenate(rows), np.concatenate(cols), np.concatenate(vals))


def best_of(fn, repeats=5):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=200_000)
    parser.add_argument("--band", type=int, default=8)
    parser.add_argument("--degree", type=int, default=50)
    args = parser.parse_args()

    op = banded_operator(args.n, args.band)
    v = probe_vector(args.n, ProbeConfig(num_probes=1, seed=0), 0)
    # Map the spectrum into [-1, 1] so the recurrence stays bounded.
    lo, hi = gershgorin_range(op)
    center, halfwidth = 0.5 * (hi + lo), 0.5 * (hi - lo)
    print(f"matrix: n={op.n}, nnz={op.nnz}; degree={args.degree}")

    impls = [("pure numpy", _kernels_py)]
    if HAVE_COMPILED:
        impls.insert(0, ("compiled", _kernels))
    else:
        print("compiled extension not available; benchmarking the fallback only")

    results = {}
    for name, impl in impls:
        t_mv = best_of(lambda: impl.csr_matvec(op.indptr, op.indices, op.data, v))
        t_table = best_of(
            lambda: impl.cheb_probe_table(op.indptr, op.indices, op.data, center, halfwidth, v, args.degree),
            repeats=3,
        )
        results[name] = (t_mv, t_table)
        print(f"{name:>12}:  matvec {t_mv * 1e3:8.3f} ms   recurrence({args.degree}) {t_table * 1e3:9.3f} ms")

    if len(results) == 2:
        mv_ratio = results["pure numpy"][0] / results["compiled"][0]
        tb_ratio = results["pure numpy"][1] / results["compiled"][1]
        print(f"{'speedup':>12}:  matvec {mv_ratio:7.2f} x    recurrence {tb_ratio:10.2f} x")

        y_c = _kernels.cheb_probe_table(op.indptr, op.indices, op.data, center, halfwidth, v, args.degree)
        y_p = _kernels_py.cheb_probe_table(op.indptr, op.indices, op.data, center, halfwidth, v, args.degree)
        print(f"agreement: max |compiled - pure| = {np.abs(y_c - y_p).max():.3e}")


if __name__ == "__main__":
    main()
