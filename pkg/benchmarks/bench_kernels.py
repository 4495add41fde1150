#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the four single-step kernels on vectors and column blocks, plus a
full-window sweep of the block bidiagonal operator, and prints one row per
case with the speedup of the compiled extension.

Usage: python benchmarks/bench_kernels.py [--n 100] [--repeats 2000]
"""

import argparse
import time

import numpy as np

from wc4dvar import _l96_numpy
from wc4dvar.covariance import CovarianceSet, make_covariance
from wc4dvar.lorenz96 import ModelConfig, integrate
from wc4dvar.operators import LinearizationState, apply_step_residual

try:
    from wc4dvar import _l96_kernels
except ImportError:
    _l96_kernels = None


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(5):
        start = time.perf_counter()
        for _ in range(repeats):
            fn()
        best = min(best, (time.perf_counter() - start) / repeats)
    return best


def bench_kernels(n, repeats):
    rng = np.random.default_rng(0)
    x = 8.0 + rng.standard_normal(n)
    dx1 = rng.standard_normal(n)
    dx64 = rng.standard_normal((n, 64))
    cases = [
        ("tendency", lambda mod: (lambda: mod.tendency(x, 8.0))),
        ("rk4_step", lambda mod: (lambda: mod.rk4_step(x, 8.0, 0.025))),
        ("rk4_tlm  (1 col)", lambda mod: (lambda: mod.rk4_tlm(x, 8.0, 0.025, dx1))),
        ("rk4_adj  (1 col)", lambda mod: (lambda: mod.rk4_adj(x, 8.0, 0.025, dx1))),
        ("rk4_tlm (64 col)", lambda mod: (lambda: mod.rk4_tlm(x, 8.0, 0.025, dx64))),
        ("rk4_adj (64 col)", lambda mod: (lambda: mod.rk4_adj(x, 8.0, 0.025, dx64))),
    ]
    rows = []
    for name, make in cases:
        cols = 64 if "64" in name else 1
        reps = max(repeats // cols, 50)
        t_np = timeit(make(_l96_numpy), reps)
        t_cy = timeit(make(_l96_kernels), reps) if _l96_kernels else float("nan")
        rows.append((name, t_np, t_cy))
    return rows


def bench_window_sweep(n, window):
    """One application of the step-residual operator over a full window.

    The model layer resolves the kernels through the backend module at call
    time, so swapping the backend attributes switches the implementation.
    """
    import wc4dvar._backend as backend

    rng = np.random.default_rng(1)
    model = ModelConfig(n=n, forcing=8.0, dt=0.025)
    covs = CovarianceSet(make_covariance(np.eye(n), 0.2), (make_covariance(np.eye(n), 0.05),) * window)
    ref = integrate(model, 8.0 + rng.standard_normal(n), window)
    lin = LinearizationState(model, ref, covs)
    v = rng.standard_normal((window + 1, n))

    rows = []
    originals = (backend.rk4_tlm, backend.rk4_adj)
    try:
        for label, mod in (("numpy", _l96_numpy), ("cython", _l96_kernels)):
            if mod is None:
                continue
            backend.rk4_tlm, backend.rk4_adj = mod.rk4_tlm, mod.rk4_adj
            rows.append((label, timeit(lambda: apply_step_residual(lin, v), 20)))
    finally:
        backend.rk4_tlm, backend.rk4_adj = originals
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=100)
    parser.add_argument("--window", type=int, default=149)
    parser.add_argument("--repeats", type=int, default=2000)
    args = parser.parse_args()

    if _l96_kernels is None:
        print("compiled extension not available; timing the numpy kernels only")

    print(f"single-step kernels, n={args.n}")
    print(f"{'kernel':<18} {'numpy':>12} {'cython':>12} {'speedup':>9}")
    for name, t_np, t_cy in bench_kernels(args.n, args.repeats):
        speed = t_np / t_cy if t_cy == t_cy else float("nan")
        print(f"{name:<18} {t_np * 1e6:>10.2f}us {t_cy * 1e6:>10.2f}us {speed:>8.1f}x")

    print(f"\nfull-window step-residual sweep, n={args.n}, window={args.window}")
    rows = dict(bench_window_sweep(args.n, args.window))
    for label, t in rows.items():
        print(f"{label:<18} {t * 1e3:>10.2f}ms")
    if len(rows) == 2:
        print(f"{'speedup':<18} {rows['numpy'] / rows['cython']:>10.1f}x")


if __name__ == "__main__":
    main()
