"""Exact diagonalization and exact linear propagation (the test oracle).

Builds the real symmetric tridiagonal Hamiltonian for either domain:

* grid: H = -(nu^2/2) * D2 + diag(V) with the 3-point Dirichlet Laplacian
  (missing neighbors outside the grid are zero),
* lattice: open chain with constant hopping on the off-diagonal and V on the
  diagonal.

Dense tridiagonal eigensolves are exact enough and fast enough at the sizes
used here; no iterative solver is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import SpectralError
from .potentials import PotentialField
from .state import Grid1D, Lattice, WaveFunction, normalize

#: Largest domain for which dense eigendecomposition is accepted.
MAX_DENSE_SIZE = 4096

#: Default hopping amplitude of the chain Hamiltonian.
CHAIN_HOPPING = -0.5


@dataclass(frozen=True, eq=False)
class TridiagonalMatrix:
    """Symmetric tridiagonal matrix stored as (diagonal, off-diagonal)."""

    diagonal: np.ndarray
    offdiagonal: np.ndarray

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diagonal * v
        out[:-1] = out[:-1] + self.offdiagonal * v[1:]
        out[1:] = out[1:] + self.offdiagonal * v[:-1]
        return out

    def dense(self) -> np.ndarray:
        return (
            np.diag(self.diagonal)
            + np.diag(self.offdiagonal, 1)
            + np.diag(self.offdiagonal, -1)
        )


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """Ascending eigenvalues plus the sign-fixed, normalized ground state."""

    eigenvalues: np.ndarray
    ground_state: WaveFunction
    n_computed: int


def build_hamiltonian_matrix(
    V: PotentialField, nu_or_hopping: float
) -> TridiagonalMatrix:
    """Discretized Hamiltonian for the potential's domain.

    ``nu_or_hopping`` is the kinetic coefficient nu on a grid and the hopping
    amplitude (normally -1/2) on a lattice.
    """
    domain = V.domain
    if isinstance(domain, Grid1D):
        nu = nu_or_hopping
        dx2 = domain.dx * domain.dx
        diag = nu * nu / dx2 + V.values
        off = np.full(domain.size - 1, -nu * nu / (2 * dx2))
    elif isinstance(domain, Lattice):
        diag = V.values.copy()
        off = np.full(domain.size - 1, nu_or_hopping)
    else:
        raise TypeError(f"unsupported domain {type(domain)!r}")
    return TridiagonalMatrix(diag, off)


def _eig_full(matrix: TridiagonalMatrix):
    try:
        return eigh_tridiagonal(matrix.diagonal, matrix.offdiagonal)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise SpectralError(f"eigensolver failed to converge: {exc}") from exc


def ground_state(V: PotentialField, nu_or_hopping: float) -> SpectrumResult:
    """Full spectrum and the lowest eigenpair of the discretized Hamiltonian.

    The ground state is sign-fixed to be nonnegative at its largest-magnitude
    entry so overlap values are reproducible.
    """
    matrix = build_hamiltonian_matrix(V, nu_or_hopping)
    w, vecs = _eig_full(matrix)
    phi = vecs[:, 0]
    if phi[int(np.argmax(np.abs(phi)))] < 0:
        phi = -phi
    residual = np.linalg.norm(matrix.matvec(phi) - w[0] * phi)
    scale = max(np.abs(w).max(), 1.0)
    if residual > 1e-8 * scale:
        raise SpectralError(
            f"ground-state residual {residual:.3e} exceeds 1e-8 * {scale:.3e}"
        )
    gs = normalize(WaveFunction(V.domain, phi.astype(complex)))
    return SpectrumResult(w, gs, n_computed=w.size)


def propagate_linear(
    psi0: WaveFunction, V: PotentialField, nu_or_hopping: float, t: float
) -> WaveFunction:
    """Exact exp(-iHt) psi0 by full eigendecomposition (norm preserving).

    Domains larger than ``MAX_DENSE_SIZE`` are rejected.
    """
    if psi0.domain != V.domain:
        raise SpectralError("state and potential live on different domains")
    if psi0.domain.size > MAX_DENSE_SIZE:
        raise SpectralError(
            f"domain size {psi0.domain.size} exceeds dense cap {MAX_DENSE_SIZE}"
        )
    matrix = build_hamiltonian_matrix(V, nu_or_hopping)
    w, vecs = _eig_full(matrix)
    coeff = vecs.T @ psi0.amplitudes
    evolved = vecs @ (np.exp(-1j * w * t) * coeff)
    return WaveFunction(psi0.domain, evolved)
