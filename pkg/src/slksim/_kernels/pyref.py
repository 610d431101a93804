"""Pure-numpy reference implementation of the hot stepping kernels.

Each propagator step is a symmetric splitting: half-step of the diagonal
term applied as a phase factor, a full Crank-Nicolson step of the
kinetic/hopping term (unconditionally stable, unitary up to roundoff), then
the second diagonal half-step with the friction field recomputed from the
current state.  States are renormalized after every full step.

The compiled backend in ``_core.pyx`` implements the same loops in C; this
module is the fallback and the parity reference.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_banded

from ..state import unwrapped_phase

BACKEND_NAME = "python"


def prepare_tridiag(a_diag: complex, a_off: complex, n: int):
    """Pack the constant-coefficient implicit matrix for per-step solves."""
    ab = np.zeros((3, n), dtype=np.complex128)
    ab[0, 1:] = a_off
    ab[1, :] = a_diag
    ab[2, :-1] = a_off
    return ab


def _cn_apply(psi: np.ndarray, handle, bd: complex, be: complex) -> np.ndarray:
    rhs = bd * psi
    rhs[:-1] += be * psi[1:]
    rhs[1:] += be * psi[:-1]
    return solve_banded((1, 1), handle, rhs)


def kostin_values(
    amplitudes: np.ndarray, rho: np.ndarray, beta: float, floor: float
) -> np.ndarray:
    """Cumulative sine of nearest-neighbor phase differences, scaled by beta.

    Phase differences come from pairwise products, so no unwrapping is
    involved; terms touching a site with density below ``floor`` contribute 0.
    """
    dphi = np.angle(amplitudes[1:] * np.conj(amplitudes[:-1]))
    ok = (rho[1:] > floor) & (rho[:-1] > floor)
    out = np.empty(amplitudes.size)
    out[0] = 0.0
    np.cumsum(np.where(ok, np.sin(dphi), 0.0), out=out[1:])
    out[1:] *= beta
    return out


def _friction_phase_continuous(
    psi: np.ndarray, rho_floor_rel: float, gauge: bool
) -> np.ndarray:
    rho = np.abs(psi) ** 2
    S = unwrapped_phase(psi, rho, rho_floor_rel * rho.max())
    if gauge:
        S = S - np.dot(rho, S) / rho.sum()
    return S


def continuous_chunk(
    psi: np.ndarray,
    V: np.ndarray,
    beta: float,
    dt: float,
    dx: float,
    rho_floor_rel: float,
    gauge: bool,
    nsteps: int,
    handle,
    bd: complex,
    be: complex,
) -> None:
    """Advance the grid state by nsteps in place."""
    for _ in range(nsteps):
        if beta != 0.0:
            diag = V + beta * _friction_phase_continuous(psi, rho_floor_rel, gauge)
        else:
            diag = V
        psi *= np.exp(-0.5j * dt * diag)
        psi[:] = _cn_apply(psi, handle, bd, be)
        if beta != 0.0:
            diag = V + beta * _friction_phase_continuous(psi, rho_floor_rel, gauge)
        psi *= np.exp(-0.5j * dt * diag)
        psi /= np.sqrt(np.sum(np.abs(psi) ** 2) * dx)


def discrete_chunk(
    psi: np.ndarray,
    V: np.ndarray,
    beta: float,
    dt: float,
    amp_floor: float,
    nsteps: int,
    handle,
    bd: complex,
    be: complex,
) -> None:
    """Advance the chain state by nsteps in place."""
    for _ in range(nsteps):
        if beta != 0.0:
            diag = V + kostin_values(psi, np.abs(psi) ** 2, beta, amp_floor)
        else:
            diag = V
        psi *= np.exp(-0.5j * dt * diag)
        psi[:] = _cn_apply(psi, handle, bd, be)
        if beta != 0.0:
            diag = V + kostin_values(psi, np.abs(psi) ** 2, beta, amp_floor)
        psi *= np.exp(-0.5j * dt * diag)
        psi /= np.linalg.norm(psi)
