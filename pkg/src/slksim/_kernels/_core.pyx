# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled stepping kernels: same contract as pyref, loops in C.

The per-step work (friction field, diagonal phase, Crank-Nicolson tridiagonal
solve, renormalization) runs without the GIL, so ensemble sweeps can thread.
"""

import numpy as np

from libc.math cimport atan2, cos, fmod, sin, sqrt

BACKEND_NAME = "cython"

cdef double PI = 3.141592653589793238462643383279502884
cdef double TWO_PI = 6.283185307179586476925286766559005768


def prepare_tridiag(a_diag, a_off, n):
    """Precompute the Thomas factorization of the constant tridiagonal matrix."""
    cdef double complex ad = a_diag
    cdef double complex ae = a_off
    cdef Py_ssize_t size = n
    cprime_arr = np.empty(max(size - 1, 0), dtype=np.complex128)
    winv_arr = np.empty(size, dtype=np.complex128)
    cdef double complex[::1] cprime = cprime_arr
    cdef double complex[::1] winv = winv_arr
    cdef double complex m
    cdef Py_ssize_t i
    m = ad
    winv[0] = 1.0 / m
    for i in range(1, size):
        cprime[i - 1] = ae * winv[i - 1]
        m = ad - ae * cprime[i - 1]
        winv[i] = 1.0 / m
    return (cprime_arr, winv_arr, complex(ae))


cdef void _cn_step(double complex[::1] psi, double complex[::1] rhs,
                   double complex[::1] cprime, double complex[::1] winv,
                   double complex ae, double complex bd, double complex be,
                   Py_ssize_t n) noexcept nogil:
    """psi <- A^-1 (B psi) with B = tridiag(be, bd, be) and A prefactored."""
    cdef Py_ssize_t i
    if n == 1:
        psi[0] = bd * psi[0] * winv[0]
        return
    rhs[0] = bd * psi[0] + be * psi[1]
    for i in range(1, n - 1):
        rhs[i] = bd * psi[i] + be * (psi[i - 1] + psi[i + 1])
    rhs[n - 1] = bd * psi[n - 1] + be * psi[n - 2]
    # forward sweep
    rhs[0] = rhs[0] * winv[0]
    for i in range(1, n):
        rhs[i] = (rhs[i] - ae * rhs[i - 1]) * winv[i]
    # back substitution
    psi[n - 1] = rhs[n - 1]
    for i in range(n - 2, -1, -1):
        psi[i] = rhs[i] - cprime[i] * psi[i + 1]


cdef void _apply_phase(double complex[::1] psi, double[::1] diag,
                       double half_dt, Py_ssize_t n) noexcept nogil:
    """psi[i] *= exp(-i * half_dt * diag[i])."""
    cdef Py_ssize_t i
    cdef double th
    cdef double complex rot
    for i in range(n):
        th = half_dt * diag[i]
        rot = cos(th) - 1j * sin(th)
        psi[i] = psi[i] * rot


cdef void _renormalize(double complex[::1] psi, double weight,
                       Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i
    cdef double acc = 0.0, inv
    for i in range(n):
        acc += psi[i].real * psi[i].real + psi[i].imag * psi[i].imag
    inv = 1.0 / sqrt(acc * weight)
    for i in range(n):
        psi[i] = psi[i] * inv


cdef void _friction_phase_cont(double complex[::1] psi, double[::1] S,
                               double[::1] rho, double rho_floor_rel,
                               bint gauge, Py_ssize_t n) noexcept nogil:
    """Unwrapped Arg(psi), held across low-density gaps, optionally gauged."""
    cdef Py_ssize_t i, first_rel = -1
    cdef double maxrho = 0.0, flo, ang, prev, d, ddmod, cur = 0.0
    cdef double mean_num = 0.0, mean_den = 0.0
    for i in range(n):
        rho[i] = psi[i].real * psi[i].real + psi[i].imag * psi[i].imag
        if rho[i] > maxrho:
            maxrho = rho[i]
    flo = rho_floor_rel * maxrho
    prev = 0.0
    for i in range(n):
        if rho[i] > flo:
            ang = atan2(psi[i].imag, psi[i].real)
            if first_rel < 0:
                first_rel = i
                cur = ang
            else:
                d = ang - prev
                # match np.unwrap: map the difference into (-pi, pi]
                ddmod = fmod(d + PI, TWO_PI)
                if ddmod < 0:
                    ddmod += TWO_PI
                ddmod -= PI
                if ddmod == -PI and d > 0:
                    ddmod = PI
                cur += ddmod
            prev = ang
        S[i] = cur
    if first_rel < 0:
        for i in range(n):
            S[i] = 0.0
        return
    for i in range(first_rel):
        S[i] = S[first_rel]
    if gauge:
        for i in range(n):
            mean_num += rho[i] * S[i]
            mean_den += rho[i]
        d = mean_num / mean_den
        for i in range(n):
            S[i] -= d


cdef void _kostin(double complex[::1] psi, double[::1] K, double[::1] rho,
                  double beta, double floor_abs, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i
    cdef double acc = 0.0, dphi
    cdef double complex z
    for i in range(n):
        rho[i] = psi[i].real * psi[i].real + psi[i].imag * psi[i].imag
    K[0] = 0.0
    for i in range(1, n):
        if rho[i] > floor_abs and rho[i - 1] > floor_abs:
            z = psi[i] * psi[i - 1].conjugate()
            dphi = atan2(z.imag, z.real)
            acc += sin(dphi)
        K[i] = beta * acc


def continuous_chunk(psi_arr, V_arr, double beta, double dt, double dx,
                     double rho_floor_rel, bint gauge, Py_ssize_t nsteps,
                     handle, bd, be):
    """Advance the grid state by nsteps in place."""
    cdef double complex[::1] psi = psi_arr
    cdef const double[::1] V = V_arr
    cdef double complex[::1] cprime = handle[0]
    cdef double complex[::1] winv = handle[1]
    cdef double complex ae = handle[2]
    cdef double complex cbd = bd
    cdef double complex cbe = be
    cdef Py_ssize_t n = psi.shape[0]
    diag_arr = np.empty(n, dtype=np.float64)
    s_arr = np.empty(n, dtype=np.float64)
    rho_arr = np.empty(n, dtype=np.float64)
    rhs_arr = np.empty(n, dtype=np.complex128)
    cdef double[::1] diag = diag_arr
    cdef double[::1] S = s_arr
    cdef double[::1] rho = rho_arr
    cdef double complex[::1] rhs = rhs_arr
    cdef Py_ssize_t step, i
    cdef double half = 0.5 * dt
    with nogil:
        for step in range(nsteps):
            if beta != 0.0:
                _friction_phase_cont(psi, S, rho, rho_floor_rel, gauge, n)
                for i in range(n):
                    diag[i] = V[i] + beta * S[i]
            else:
                for i in range(n):
                    diag[i] = V[i]
            _apply_phase(psi, diag, half, n)
            _cn_step(psi, rhs, cprime, winv, ae, cbd, cbe, n)
            if beta != 0.0:
                _friction_phase_cont(psi, S, rho, rho_floor_rel, gauge, n)
                for i in range(n):
                    diag[i] = V[i] + beta * S[i]
            _apply_phase(psi, diag, half, n)
            _renormalize(psi, dx, n)


def discrete_chunk(psi_arr, V_arr, double beta, double dt, double amp_floor,
                   Py_ssize_t nsteps, handle, bd, be):
    """Advance the chain state by nsteps in place."""
    cdef double complex[::1] psi = psi_arr
    cdef const double[::1] V = V_arr
    cdef double complex[::1] cprime = handle[0]
    cdef double complex[::1] winv = handle[1]
    cdef double complex ae = handle[2]
    cdef double complex cbd = bd
    cdef double complex cbe = be
    cdef Py_ssize_t n = psi.shape[0]
    diag_arr = np.empty(n, dtype=np.float64)
    k_arr = np.empty(n, dtype=np.float64)
    rho_arr = np.empty(n, dtype=np.float64)
    rhs_arr = np.empty(n, dtype=np.complex128)
    cdef double[::1] diag = diag_arr
    cdef double[::1] K = k_arr
    cdef double[::1] rho = rho_arr
    cdef double complex[::1] rhs = rhs_arr
    cdef Py_ssize_t step, i
    cdef double half = 0.5 * dt
    with nogil:
        for step in range(nsteps):
            if beta != 0.0:
                _kostin(psi, K, rho, beta, amp_floor, n)
                for i in range(n):
                    diag[i] = V[i] + K[i]
            else:
                for i in range(n):
                    diag[i] = V[i]
            _apply_phase(psi, diag, half, n)
            _cn_step(psi, rhs, cprime, winv, ae, cbd, cbe, n)
            if beta != 0.0:
                _kostin(psi, K, rho, beta, amp_floor, n)
                for i in range(n):
                    diag[i] = V[i] + K[i]
            _apply_phase(psi, diag, half, n)
            _renormalize(psi, 1.0, n)
