#!/usr/bin/env python3
"""Time the compiled kernels against their plain array fallbacks.

Runs both backends on identical inputs across a few problem sizes and
prints a table of best-of-N wall times. The compiled path is warmed
first so JIT compilation never lands in a timed region.

Usage: python3 benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from beamlab import _kernels

SIZES = ((10, 200), (20, 200), (20, 1801), (40, 3600))


def _inputs(n, g, seed=0):
    rng = np.random.default_rng(seed)
    positions = np.arange(n) * 0.5 + rng.uniform(-0.05, 0.05, n)
    sines = np.sort(rng.uniform(-1.0, 1.0, g))
    x = rng.standard_normal((n, 4 * n)) + 1j * rng.standard_normal((n, 4 * n))
    rinv = np.linalg.inv(x @ x.conj().T / (4 * n) + np.eye(n))
    rinv = np.ascontiguousarray((rinv + rinv.conj().T) / 2)
    deltas = rng.uniform(0.01, 0.1, g)
    return positions, sines, rinv, deltas


def _best(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=20, help="timing repeats per case")
    args = parser.parse_args()

    has_numba = _kernels.HAS_NUMBA
    if has_numba:
        positions, sines, rinv, deltas = _inputs(4, 8)
        steer = _kernels._steering_grid_nb(positions, sines)
        _kernels._capon_accumulate_nb(np.ascontiguousarray(steer), rinv, deltas)
    else:
        print("numba unavailable; timing the fallback only\n")

    header = f"{'kernel':18s} {'n':>4s} {'grid':>6s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for n, g in SIZES:
        positions, sines, rinv, deltas = _inputs(n, g)
        steer = np.ascontiguousarray(_kernels.steering_grid_numpy(positions, sines))

        cases = (
            ("steering_grid",
             lambda: _kernels.steering_grid_numpy(positions, sines),
             (lambda: _kernels._steering_grid_nb(positions, sines)) if has_numba else None),
            ("capon_accumulate",
             lambda: _kernels.capon_accumulate_numpy(steer, rinv, deltas),
             (lambda: _kernels._capon_accumulate_nb(steer, rinv, deltas)) if has_numba else None),
        )
        for name, np_fn, nb_fn in cases:
            t_np = _best(np_fn, args.repeats) * 1e3
            if nb_fn is None:
                print(f"{name:18s} {n:4d} {g:6d} {t_np:10.3f} {'-':>10s} {'-':>8s}")
                continue
            t_nb = _best(nb_fn, args.repeats) * 1e3
            np.testing.assert_allclose(nb_fn(), np_fn(), atol=1e-10)
            print(f"{name:18s} {n:4d} {g:6d} {t_np:10.3f} {t_nb:10.3f} {t_np / t_nb:8.2f}")


if __name__ == "__main__":
    main()
