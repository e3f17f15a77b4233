"""Compiled vs numpy spatial operator, and a short transient run with each.

Usage: python benchmarks/bench_kernels.py [--repeat 200]
"""
import argparse
import math
import time

import numpy as np

from outflowlab import eos, kernels, stationary, transient


def bench_rhs(kern, n, repeat):
    rng = np.random.default_rng(0)
    rho = 1 + 0.1 * rng.random(n)
    u = -1 - 0.1 * rng.random(n)
    th = 1 + 0.1 * rng.random(n)
    p, pt, et = rho * th, rho.copy(), np.full(n, 2.5)
    out = [np.empty(n) for _ in range(3)]
    kern.rhs(rho, u, th, p, pt, et, 0.01, 1.0, 1.0, *out)
    t0 = time.perf_counter()
    for _ in range(repeat):
        kern.rhs(rho, u, th, p, pt, et, 0.01, 1.0, 1.0, *out)
    return (time.perf_counter() - t0) / repeat


def bench_run(backend, N, t_end):
    gas = eos.make_gas("ideal-polytropic", gamma=1.4)
    spec = stationary.FarFieldSpec(1.0, 1.0, -math.sqrt(1.4), gas)
    prof = stationary.build_transonic_profile(spec, 0.1, N=N, validate=False)
    cfg = transient.SolverConfig(t_end=t_end, stride=10**9, backend=backend)
    solver = transient.Solver(gas, transient.Grid1D(prof.L, N), cfg, transient.boundary_from_profile(prof))
    t0 = time.perf_counter()
    res = solver.run(transient.state_from_profile(prof))
    return time.perf_counter() - t0, res


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--t-end", type=float, default=2.0)
    args = ap.parse_args()
    have_c = kernels.BACKEND == "cython"
    if not have_c:
        print("compiled kernel not built; only the numpy backend is timed")
    print(f"{'N':>7} {'numpy [us]':>12} {'cython [us]':>12} {'speedup':>8}")
    for n in (1025, 4097, 16385):
        tp = bench_rhs(kernels.get("python"), n, args.repeat) * 1e6
        if have_c:
            tc = bench_rhs(kernels.get("cython"), n, args.repeat) * 1e6
            print(f"{n:>7} {tp:>12.1f} {tc:>12.1f} {tp / tc:>8.1f}")
        else:
            print(f"{n:>7} {tp:>12.1f} {'-':>12} {'-':>8}")
    print(f"\ntransient run, transonic profile, N=4096, t_end={args.t_end}")
    tp, rp = bench_run("python", 4096, args.t_end)
    print(f"  numpy : {tp:.2f} s  ({rp.n_steps} steps)")
    if have_c:
        tc, rc = bench_run("cython", 4096, args.t_end)
        diff = transient.sup_deviation(rp.final, rc.final)
        print(f"  cython: {tc:.2f} s  speedup {tp / tc:.1f}x, max field difference {diff:.2e}")


if __name__ == "__main__":
    main()
