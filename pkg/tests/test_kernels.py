"""Backend parity: the compiled kernels must reproduce the numpy fallback."""

import numpy as np
import pytest

from slksim._kernels import BACKEND, pyref

_core = pytest.importorskip(
    "slksim._kernels._core", reason="compiled kernels not built"
)


def _random_grid_state(rng, n, dx):
    psi = rng.normal(size=n) + 1j * rng.normal(size=n)
    psi *= np.exp(-np.linspace(-4, 4, n) ** 2)
    psi /= np.sqrt(np.sum(np.abs(psi) ** 2) * dx)
    return psi


class TestParity:
    def test_continuous_chunk(self):
        rng = np.random.default_rng(7)
        n, dx = 257, 0.05
        nu, dt, beta = 1.0, 1e-3, 0.7
        psi_a = _random_grid_state(rng, n, dx)
        psi_b = psi_a.copy()
        V = rng.normal(size=n)
        kd, ke = nu / dx**2, -nu / (2 * dx**2)
        a_diag, a_off = 1 + 0.5j * dt * kd, 0.5j * dt * ke
        bd, be = 1 - 0.5j * dt * kd, -0.5j * dt * ke
        pyref.continuous_chunk(
            psi_a, V, beta, dt, dx, 1e-12, True, 80,
            pyref.prepare_tridiag(a_diag, a_off, n), bd, be,
        )
        _core.continuous_chunk(
            psi_b, V, beta, dt, dx, 1e-12, True, 80,
            _core.prepare_tridiag(a_diag, a_off, n), bd, be,
        )
        assert np.max(np.abs(psi_a - psi_b)) < 1e-12

    def test_discrete_chunk(self):
        rng = np.random.default_rng(8)
        s, dt, beta = 100, 0.02, 0.08
        psi_a = rng.normal(size=s) + 1j * rng.normal(size=s)
        psi_a[60:] = 0.0  # dead sites exercise the amplitude floor
        psi_a /= np.linalg.norm(psi_a)
        psi_b = psi_a.copy()
        V = 0.1 * rng.normal(size=s)
        pyref.discrete_chunk(
            psi_a, V, beta, dt, 1e-30, 300,
            pyref.prepare_tridiag(1.0 + 0j, -0.25j * dt, s), 1.0 + 0j, 0.25j * dt,
        )
        _core.discrete_chunk(
            psi_b, V, beta, dt, 1e-30, 300,
            _core.prepare_tridiag(1.0 + 0j, -0.25j * dt, s), 1.0 + 0j, 0.25j * dt,
        )
        assert np.max(np.abs(psi_a - psi_b)) < 1e-12

    def test_beta_zero_paths(self):
        rng = np.random.default_rng(9)
        s, dt = 64, 0.01
        psi_a = rng.normal(size=s) + 1j * rng.normal(size=s)
        psi_a /= np.linalg.norm(psi_a)
        psi_b = psi_a.copy()
        V = rng.normal(size=s)
        pyref.discrete_chunk(
            psi_a, V, 0.0, dt, 1e-30, 100,
            pyref.prepare_tridiag(1.0 + 0j, -0.25j * dt, s), 1.0 + 0j, 0.25j * dt,
        )
        _core.discrete_chunk(
            psi_b, V, 0.0, dt, 1e-30, 100,
            _core.prepare_tridiag(1.0 + 0j, -0.25j * dt, s), 1.0 + 0j, 0.25j * dt,
        )
        assert np.max(np.abs(psi_a - psi_b)) < 1e-12


def test_selected_backend_is_reported():
    assert BACKEND in ("cython", "python")
