#!/usr/bin/env python3
"""Compare the compiled integration kernel against the NumPy fallback.

Runs the same stacked mean+covariance RK4 workload through both backends
and reports steps/second and the speedup.  The workload is the symmetric
delayed-build-up preset at a shortened horizon.

    python benchmarks/bench_backends.py [--steps N]
"""

import argparse
import time

import numpy as np

from twincav import _core_py
from twincav.cli import load_preset
from twincav.dynamics import auto_dt, default_initial_cov, pack_cov
from twincav.model import derive_params

try:
    from twincav import _core
except ImportError:
    _core = None


def bench(kernel, params, y0, dt, n_steps, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        times, states, fail = kernel.run_trajectory(params, y0, dt, n_steps, n_steps, 1e12)
        best = min(best, time.perf_counter() - t0)
        assert fail == -1
    return best, states[-1]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=50_000,
                        help="RK4 steps per run (compiled backend)")
    parser.add_argument("--python-steps", type=int, default=None,
                        help="steps for the fallback (default: steps/50)")
    args = parser.parse_args()

    scenario = load_preset("fig2-sym")
    d = derive_params(scenario.params)
    dt = auto_dt(d)
    cov0 = scenario.trajectory.initial_cov
    if cov0 is None:
        cov0 = default_initial_cov(d)
    y0 = np.concatenate([np.zeros(6), pack_cov(np.asarray(cov0))])
    pvec = d.as_vector()

    py_steps = args.python_steps or max(args.steps // 50, 1000)
    t_py, last_py = bench(_core_py, pvec, y0, dt, py_steps)
    py_rate = py_steps / t_py
    print(f"python fallback : {py_steps:>8d} steps in {t_py:7.3f} s "
          f"({py_rate:,.0f} steps/s)")

    if _core is None:
        print("compiled kernel : not built (install with a C toolchain + Cython)")
        return

    t_c, last_c = bench(_core, pvec, y0, dt, args.steps)
    c_rate = args.steps / t_c
    print(f"compiled kernel : {args.steps:>8d} steps in {t_c:7.3f} s "
          f"({c_rate:,.0f} steps/s)")
    print(f"speedup         : {c_rate / py_rate:,.1f}x")

    # sanity: both backends walk the same trajectory
    _, ref = bench(_core, pvec, y0, dt, py_steps, repeat=1)
    err = np.max(np.abs(ref - last_py) / (np.abs(last_py) + 1e-30))
    print(f"agreement       : max rel diff {err:.2e} after {py_steps} steps")


if __name__ == "__main__":
    main()
