"""Benchmark the compiled stepping kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--nr 7000] [--steps 2000]

Runs the same kick-drift leapfrog loop through both backends, checks the
results agree bit-for-bit, and reports per-step timings plus a full
nonlinear-system solve through the public API with each backend selected.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np


def bench_loop(mod, nr, steps):
    rng = np.random.default_rng(0)
    U = rng.normal(size=nr)
    V = rng.normal(size=nr)
    S = rng.normal(size=nr)
    t0 = time.perf_counter()
    for _ in range(steps):
        mod.leapfrog_step(U, V, S, 1.0, 2500.0, 0.001)
    elapsed = time.perf_counter() - t0
    return elapsed, U, V


def bench_solver(backend, nr_flag):
    code = (
        "import time\n"
        "from kgzlab.radial import InitialDataSpec, RadialGrid, make_initial_state\n"
        "from kgzlab.evolve import SolverConfig, solve_kgz\n"
        "import kgzlab._kernels as k\n"
        "spec = InitialDataSpec(eps=0.01)\n"
        f"grid = RadialGrid(nr={nr_flag}, dr=0.02)\n"
        "data = make_initial_state(spec, grid)\n"
        "cfg = SolverConfig(grid=grid, t_max=(grid.R - 12.0) * 0.9, snapshot_stride=10**9,\n"
        "                   support_radius=spec.support_radius)\n"
        "t0 = time.perf_counter()\n"
        "solve_kgz(cfg, data)\n"
        "print(f'{k.BACKEND} {time.perf_counter() - t0:.3f}')\n"
    )
    env = dict(os.environ)
    if backend == "py":
        env["KGZLAB_KERNELS"] = "py"
    else:
        env.pop("KGZLAB_KERNELS", None)
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    if out.returncode != 0:
        raise RuntimeError(out.stderr)
    return out.stdout.strip()


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--nr", type=int, default=7000)
    ap.add_argument("--steps", type=int, default=2000)
    args = ap.parse_args()

    from kgzlab._kernels import _ref

    try:
        from kgzlab._kernels import _core
    except ImportError:
        _core = None

    t_ref, U_ref, V_ref = bench_loop(_ref, args.nr, args.steps)
    print(f"numpy fallback : {1e6 * t_ref / args.steps:8.1f} us/step  ({args.nr} nodes)")
    if _core is not None:
        t_c, U_c, V_c = bench_loop(_core, args.nr, args.steps)
        print(f"cython kernel  : {1e6 * t_c / args.steps:8.1f} us/step  ({args.nr} nodes)")
        print(f"speedup        : {t_ref / t_c:8.2f}x")
        bitwise = np.array_equal(U_ref, U_c) and np.array_equal(V_ref, V_c)
        print(f"bit-identical  : {bitwise}")
        if not bitwise:
            raise SystemExit("backend results diverged")
    else:
        print("cython kernel  : not built")

    print("\nfull nonlinear solve through the public API:")
    for backend in ("py", "c") if _core is not None else ("py",):
        print("  backend", bench_solver(backend, args.nr))


if __name__ == "__main__":
    main()
