"""Benchmark the compiled kernels against the pure-numpy fallback.

Times the fibering scan (the solver's hot loop), the fused quadrature
sums, and an end-to-end ground-state solve under each backend.  The solve
comparison runs in subprocesses so each one binds its backend at import.

Usage: python benchmarks/bench_backends.py [--fast]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from nehari_gs import _kernels_py
from nehari_gs.model import RHO_SQRT_SHIFT

try:
    from nehari_gs import _fastkernels
except ImportError:
    _fastkernels = None


def time_call(fn, *args, repeat=5, **kwargs):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args, **kwargs)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(n_nodes=2001, n_scales=721):
    rng = np.random.default_rng(0)
    ts = np.ascontiguousarray(np.logspace(-6, 6, n_scales))
    u2 = np.ascontiguousarray(rng.random(n_nodes))
    wu2du2 = np.ascontiguousarray(rng.random(n_nodes))
    wu4du2 = np.ascontiguousarray(rng.random(n_nodes))
    scan_args = (ts, 5.0, 1.0, u2, wu2du2, wu4du2, RHO_SQRT_SHIFT, 0.0, 0.0, 1.0, 5.0, 2.0)

    arrs = [np.ascontiguousarray(rng.standard_normal(n_nodes)) for _ in range(5)]

    rows = []
    for label, mod in (("python", _kernels_py), ("compiled", _fastkernels)):
        if mod is None:
            rows.append((label, None, None))
            continue
        t_scan = time_call(mod.fiber_scan, *scan_args)
        t_quad = time_call(mod.quad_form_parts, *arrs, repeat=20)
        rows.append((label, t_scan, t_quad))
    return rows


SOLVE_SNIPPET = """
import time
import nehari_gs as ngs

grid = ngs.build_grid(3, 20.0, {n})
spec = ngs.ProblemSpec(dim=3, lam=1.0,
    potential=ngs.PotentialSpec.constant(1.0),
    nonlinearity=ngs.NonlinearitySpec.power(1.0, 5.0),
    rho=ngs.RhoSpec.sqrt_shift())
opts = ngs.SolverOptions(sigmas=(1.0, 2.0), amplitudes=(1.0,))
t0 = time.perf_counter()
res = ngs.solve_ground_state(grid, spec, opts)
dt = time.perf_counter() - t0
print(f"{{ngs.backend_name()}} {{dt:.3f}} {{res.energy_m:.12g}}")
"""


def bench_solve(n=801):
    rows = []
    for backend in ("python", "compiled"):
        if backend == "compiled" and _fastkernels is None:
            rows.append((backend, None, None))
            continue
        env = {**os.environ, "NEHARI_GS_BACKEND": backend}
        proc = subprocess.run(
            [sys.executable, "-c", SOLVE_SNIPPET.format(n=n)],
            env=env, capture_output=True, text=True,
        )
        if proc.returncode != 0:
            print(proc.stderr, file=sys.stderr)
            rows.append((backend, None, None))
            continue
        name, dt, energy = proc.stdout.split()
        assert name == backend
        rows.append((backend, float(dt), float(energy)))
    return rows


def fmt(t, unit="ms"):
    if t is None:
        return "unavailable"
    return f"{t * 1e3:8.2f} {unit}" if unit == "ms" else f"{t:8.3f} {unit}"


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--fast", action="store_true", help="smaller sizes")
    args = parser.parse_args()

    n_nodes = 801 if args.fast else 2001
    print(f"fibering scan: {n_nodes} nodes x 721 scales; fused quadrature sums: {n_nodes} nodes")
    print(f"{'backend':10s} {'fiber_scan':>14s} {'quad_form_parts':>18s}")
    kernel_rows = bench_kernels(n_nodes=n_nodes)
    for label, t_scan, t_quad in kernel_rows:
        print(f"{label:10s} {fmt(t_scan):>14s} {fmt(t_quad):>18s}")

    n_solve = 401 if args.fast else 801
    print(f"\nend-to-end solve (n = {n_solve}, two starts):")
    print(f"{'backend':10s} {'wall time':>12s} {'energy':>20s}")
    for backend, dt, energy_val in bench_solve(n=n_solve):
        e = "-" if energy_val is None else f"{energy_val:.12g}"
        print(f"{backend:10s} {fmt(dt, 's'):>12s} {e:>20s}")

    both = [r for r in kernel_rows if r[1] is not None]
    if len(both) == 2:
        speedup = both[0][1] / both[1][1]
        print(f"\nfiber_scan speedup (compiled over python): {speedup:.1f}x")


if __name__ == "__main__":
    main()
