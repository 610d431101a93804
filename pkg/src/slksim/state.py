"""Grids, lattices, wavefunction containers and density/phase decomposition.

Conventions used throughout the package:

* A ``Grid1D`` samples the real line at ``n`` evenly spaced points including
  both endpoints; inner products and norms carry the ``dx`` quadrature weight
  so observables converge to their L2 values under grid refinement.
* A ``Lattice`` is an open chain of sites ``1..s``; its inner product is the
  plain l2 sum.
* All containers are immutable after construction (arrays are marked
  read-only), so values can be shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DegenerateStateError, DomainMismatchError

#: Relative density threshold below which the local phase is considered
#: unreliable and held at the last reliable value.
DEFAULT_RHO_FLOOR = 1e-12


@dataclass(frozen=True)
class Grid1D:
    """Uniform 1-D grid on ``[x_min, x_max]`` with ``n >= 3`` points."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError("Grid1D requires x_min < x_max")
        if self.n < 3:
            raise ValueError("Grid1D requires n >= 3")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def size(self) -> int:
        return self.n

    @property
    def weight(self) -> float:
        """Quadrature weight of the discrete inner product."""
        return self.dx

    def points(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n)


@dataclass(frozen=True)
class Lattice:
    """Open chain of ``s`` sites labeled ``1..s``, edges between neighbors only."""

    s: int

    def __post_init__(self):
        if self.s < 1:
            raise ValueError("Lattice requires s >= 1")

    @property
    def size(self) -> int:
        return self.s

    @property
    def weight(self) -> float:
        return 1.0

    def points(self) -> np.ndarray:
        return np.arange(1, self.s + 1, dtype=float)


Domain = Union[Grid1D, Lattice]


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True, order="C")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """Complex amplitude field over a grid or lattice."""

    domain: Domain
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen_array(self.amplitudes, np.complex128)
        if amps.shape != (self.domain.size,):
            raise ValueError(
                f"amplitude count {amps.shape} does not match domain size "
                f"{self.domain.size}"
            )
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(
            np.sqrt(np.sum(np.abs(self.amplitudes) ** 2) * self.domain.weight)
        )

    def density(self) -> np.ndarray:
        """|psi|^2 as a fresh writable array."""
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True, eq=False)
class DensityPhase:
    """Polar decomposition psi = sqrt(rho) * exp(i*phase)."""

    rho: np.ndarray
    phase: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rho", _frozen_array(self.rho, np.float64))
        object.__setattr__(self, "phase", _frozen_array(self.phase, np.float64))
        if self.rho.shape != self.phase.shape:
            raise ValueError("rho and phase must have equal length")


def require_same_domain(a: WaveFunction | None, *others) -> None:
    for other in others:
        if a is not None and other is not None and a.domain != other.domain:
            raise DomainMismatchError(
                f"domain mismatch: {a.domain} vs {other.domain}"
            )


def normalize(psi: WaveFunction) -> WaveFunction:
    """Return psi scaled to unit norm under its domain's weighting.

    Raises ``DegenerateStateError`` for zero-norm input.
    """
    nrm = psi.norm()
    if nrm == 0.0 or not np.isfinite(nrm):
        raise DegenerateStateError("degenerate state: zero or non-finite norm")
    return WaveFunction(psi.domain, psi.amplitudes / nrm)


def inner(a: WaveFunction, b: WaveFunction) -> complex:
    """<a|b>, conjugate-linear in the first argument, dx-weighted on grids."""
    require_same_domain(a, b)
    return complex(np.sum(np.conj(a.amplitudes) * b.amplitudes) * a.domain.weight)


def unwrapped_phase(
    amplitudes: np.ndarray, rho: np.ndarray, floor: float
) -> np.ndarray:
    """Pointwise Arg(psi) unwrapped left to right across reliable indices.

    Indices with ``rho <= floor`` (an absolute density value) inherit the last
    reliable phase to the left; leading unreliable indices inherit the first
    reliable one.  The result is finite everywhere for any nonzero state.
    """
    idx = np.flatnonzero(rho > floor)
    if idx.size == 0:
        return np.zeros(amplitudes.size)
    vals = np.unwrap(np.angle(amplitudes[idx]))
    pos = np.searchsorted(idx, np.arange(amplitudes.size), side="right") - 1
    return vals[np.clip(pos, 0, None)]


def to_density_phase(psi: WaveFunction, rho_floor: float | None = None) -> DensityPhase:
    """Decompose a normalized state into density and unwrapped phase.

    ``rho_floor`` is relative to ``max(rho)``; below it the phase is held at
    the last reliable value (it is dynamically irrelevant there but must stay
    finite).  Defaults to ``DEFAULT_RHO_FLOOR``.
    """
    if rho_floor is None:
        rho_floor = DEFAULT_RHO_FLOOR
    if rho_floor < 0:
        raise ValueError("rho_floor must be nonnegative")
    rho = psi.density()
    floor = rho_floor * rho.max() if rho.size else 0.0
    phase = unwrapped_phase(psi.amplitudes, rho, floor)
    return DensityPhase(rho, phase)
