"""Benchmark the compiled stepping kernels against the numpy fallback.

Usage:  python benchmarks/bench_backends.py [--steps-grid N] [--steps-chain N]

Times the friction propagators on the two production problem sizes (1024-point
grid, 100-site chain) with identical inputs, and reports steps/second per
backend plus the speedup.  The backends are exercised directly, bypassing the
import-time selection.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from slksim._kernels import pyref

try:
    from slksim._kernels import _core
except ImportError:
    _core = None


def grid_problem(n=1024, dx=20.0 / 1023, nu=1.0, dt=1e-3, beta=0.5):
    rng = np.random.default_rng(42)
    x = np.linspace(-10, 10, n)
    psi = np.exp(-((x + 1.5) ** 2) / 1.21).astype(np.complex128)
    psi /= np.sqrt(np.sum(np.abs(psi) ** 2) * dx)
    V = 0.5 * (x**2 - 2.25) ** 2 / 5.06 + 0.1 * x + 0.01 * rng.normal(size=n)
    kd, ke = nu / dx**2, -nu / (2 * dx**2)
    spec = dict(
        a_diag=1 + 0.5j * dt * kd,
        a_off=0.5j * dt * ke,
        bd=1 - 0.5j * dt * kd,
        be=-0.5j * dt * ke,
    )
    return psi, V, beta, dt, dx, spec


def chain_problem(s=100, dt=0.02, beta=0.08):
    psi = np.zeros(s, dtype=np.complex128)
    xs = np.arange(1, 18)
    psi[:17] = np.sqrt(2.0 / 18) * np.sin(8 * np.pi * xs / 18)
    V = -0.06 * np.arange(1, s + 1, dtype=float)
    spec = dict(a_diag=1.0 + 0j, a_off=-0.25j * dt, bd=1.0 + 0j, be=0.25j * dt)
    return psi, V, beta, dt, spec


def run_chunk(backend, kind, nsteps):
    if kind == "grid":
        psi, V, beta, dt, dx, spec = grid_problem()
        handle = backend.prepare_tridiag(spec["a_diag"], spec["a_off"], psi.size)
        backend.continuous_chunk(
            psi, V, beta, dt, dx, 1e-12, True, nsteps, handle, spec["bd"], spec["be"]
        )
    else:
        psi, V, beta, dt, spec = chain_problem()
        handle = backend.prepare_tridiag(spec["a_diag"], spec["a_off"], psi.size)
        backend.discrete_chunk(
            psi, V, beta, dt, 1e-30, nsteps, handle, spec["bd"], spec["be"]
        )
    return psi


def time_backend(backend, kind, nsteps):
    run_chunk(backend, kind, min(10, nsteps))  # warm up
    t0 = time.perf_counter()
    run_chunk(backend, kind, nsteps)
    return nsteps / (time.perf_counter() - t0)


# Parity is checked over a short horizon.  Over long friction runs the
# trajectories are ulp-sensitive (a one-ulp perturbation within a single
# backend grows the same way), so only observables agree at long times.
PARITY_STEPS = 1000


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps-grid", type=int, default=2000)
    parser.add_argument("--steps-chain", type=int, default=50000)
    args = parser.parse_args()

    print(f"{'problem':<28}{'backend':<10}{'steps/s':>12}{'speedup':>10}")
    for kind, nsteps, label in (
        ("grid", args.steps_grid, "grid n=1024, friction"),
        ("chain", args.steps_chain, "chain s=100, friction"),
    ):
        py_rate = time_backend(pyref, kind, nsteps)
        print(f"{label:<28}{'python':<10}{py_rate:>12.0f}{'1.0x':>10}")
        if _core is None:
            print(f"{label:<28}{'cython':<10}{'not built':>12}{'-':>10}")
            continue
        cy_rate = time_backend(_core, kind, nsteps)
        drift = np.max(
            np.abs(run_chunk(pyref, kind, PARITY_STEPS) - run_chunk(_core, kind, PARITY_STEPS))
        )
        print(
            f"{label:<28}{'cython':<10}{cy_rate:>12.0f}"
            f"{cy_rate / py_rate:>9.1f}x   (parity over {PARITY_STEPS} steps: {drift:.1e})"
        )


if __name__ == "__main__":
    main()
