"""Time the float kernels under numba and under plain numpy.

    python benchmarks/bench_kernels.py [--repeat 5]

Only the quadrature integrand and the tail sums have two backends.  The
fast-float series is a pair of BLAS products either way, and the certified
path is big-integer arithmetic, timed once at the end for scale.
"""

import argparse
import time

import numpy as np

from spheremass import kernels
from spheremass.integrals import source_moment_integrand
from spheremass.mass import Manifold, build_spectral_table, partial_sum
from spheremass.xyfunc import F_SOURCE, box_xy


def bench(func, *args, repeat=5, warmup=True):
    if warmup:
        func(*args)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        func(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def monomial_case(u, npts):
    mons = list(u.monomials())
    ex = np.array([a for _, a, _ in mons], dtype=np.int64)
    ey = np.array([b for _, _, b in mons], dtype=np.int64)
    coef = np.array([float(c) for c, _, _ in mons])
    rng = np.random.default_rng(0)
    xs = rng.random(npts)
    ys = rng.random(npts)
    return xs, ys, ex, ey, coef, u.k


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    impls = [kernels.numpy_impl] + ([kernels.numba_impl] if kernels.numba_impl else [])

    cases = [
        ("eval_monomials x^3y^3 f, 2e5 pts", "eval_monomials", monomial_case(source_moment_integrand(3, 3), 200_000)),
        ("eval_monomials (box f)^2, 2e5 pts", "eval_monomials", monomial_case(box_xy(F_SOURCE) ** 2, 200_000)),
        ("brute_tail N=40, size 1600", "brute_tail", (40, 1600, 0)),
        ("brute_tail N=40, size 1600, even-even", "brute_tail", (40, 1600, 2)),
    ]
    print(f"{'kernel':42s} " + " ".join(f"{i.name:>10s}" for i in impls) + "   speedup")
    for label, name, case in cases:
        times = [bench(getattr(i, name), *case, repeat=args.repeat) for i in impls]
        speed = f"{times[0] / times[-1]:8.1f}x" if len(times) > 1 else ""
        print(f"{label:42s} " + " ".join(f"{t * 1e3:8.2f}ms" for t in times) + f"  {speed}")

    t0 = time.perf_counter()
    table = build_spectral_table(100)
    t1 = time.perf_counter()
    for m in Manifold:
        partial_sum(m, 100, table=table)
    t2 = time.perf_counter()
    print(f"\nexact table N=100: {t1 - t0:.2f}s, three partial sums: {t2 - t1:.2f}s")


if __name__ == "__main__":
    main()
