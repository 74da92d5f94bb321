#!/usr/bin/env python3
"""Compiled vs pure-numpy RK4 kernel: wall time per simulated second and agreement.

    python benchmarks/bench_integrator.py [--steps N] [--repeat R]
"""

import argparse
import time

import numpy as np

from dualbloch import kernels
from dualbloch._backend import HAS_NUMBA
from dualbloch.core import SystemParams, default_initial_state

_NO_NOISE = np.empty((0, 0))


def _args(params, n_steps, dt):
    y0 = np.array(default_initial_state(params).m)
    return (y0, *params.kernel_args(), dt, n_steps, 1, 0, _NO_NOISE, params.gamma)


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    dt = 5e-6
    params = SystemParams.from_split(110.0, 20.0)
    kargs = _args(params, args.steps, dt)
    sim_seconds = args.steps * dt

    print(f"RK4, {args.steps} steps of {dt:g} s (point 110 Hz / 20 alpha_c)")
    t_np, (ref, _) = best_of(kernels.rk4_numpy, kargs, args.repeat)
    print(f"  numpy : {t_np * 1e3:9.2f} ms   {t_np / sim_seconds:9.3f} s per simulated s")

    if not HAS_NUMBA:
        print("  numba : not installed")
        return
    t0 = time.perf_counter()
    kernels.rk4_numba(*_args(params, 10, dt))
    print(f"  numba first call (compile or cache load): {(time.perf_counter() - t0) * 1e3:.0f} ms")
    t_nb, (fast, _) = best_of(kernels.rk4_numba, kargs, args.repeat)
    print(f"  numba : {t_nb * 1e3:9.2f} ms   {t_nb / sim_seconds:9.3f} s per simulated s")
    print(f"  speedup x{t_np / t_nb:.0f}, max |difference| = {np.max(np.abs(fast - ref)):.3g}")


if __name__ == "__main__":
    main()
