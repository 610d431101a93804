"""Construction of every potential profile used by the simulators.

Covers the inverse-problem potential whose ground state is a prescribed
positive Gaussian mixture, the piecewise asymmetric double well, the linear
tilt and seeded Gaussian site disorder on chains, plus tabulated values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .errors import PotentialConstructionError
from .state import Domain, Grid1D, Lattice, WaveFunction, normalize, _frozen_array


@dataclass(frozen=True, eq=False)
class PotentialField:
    """Real site/grid energies, finite everywhere unless allow_nan is set."""

    domain: Domain
    values: np.ndarray
    allow_nan: bool = False

    def __post_init__(self):
        vals = _frozen_array(self.values, np.float64)
        if vals.shape != (self.domain.size,):
            raise ValueError(
                f"value count {vals.shape} does not match domain size "
                f"{self.domain.size}"
            )
        if not self.allow_nan and not np.all(np.isfinite(vals)):
            raise ValueError("potential must be finite at every point")
        object.__setattr__(self, "values", vals)


def tabulated(domain: Domain, values) -> PotentialField:
    """Wrap explicit per-point values as a potential."""
    return PotentialField(domain, values)


# ---------------------------------------------------------------------------
# Inverse problem: potential with a prescribed triple-Gaussian ground state
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TripleGaussianGroundState:
    """Positive mixture of three Gaussians centered at +a, -a and 0.

    The mixture (unnormalized) is

        c_plus  * exp(-(x-a)^2 / (4 sigma_plus^2))
      + c_minus * exp(-(x+a)^2 / (4 sigma_minus^2))
      + c_0     * exp(-x^2 / (4 sigma_0^2))

    and must be strictly positive on the grid it is sampled on.
    """

    a: float
    sigma_plus: float
    sigma_minus: float
    sigma_0: float
    c_plus: float
    c_minus: float
    c_0: float

    def __post_init__(self):
        for name in ("sigma_plus", "sigma_minus", "sigma_0"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def _terms(self, x: np.ndarray):
        return (
            (self.c_plus, x - self.a, self.sigma_plus),
            (self.c_minus, x + self.a, self.sigma_minus),
            (self.c_0, x, self.sigma_0),
        )

    def value(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros_like(x, dtype=float)
        for c, u, sig in self._terms(x):
            out += c * np.exp(-(u * u) / (4 * sig * sig))
        return out

    def second_derivative(self, x: np.ndarray) -> np.ndarray:
        """Exact second derivative of the mixture (no finite differences)."""
        out = np.zeros_like(x, dtype=float)
        for c, u, sig in self._terms(x):
            g = c * np.exp(-(u * u) / (4 * sig * sig))
            out += g * ((u * u) / (4 * sig**4) - 1.0 / (2 * sig * sig))
        return out


#: Defaults for the triple-Gaussian construction: a clear triple-well
#: potential with its global minimum on the right, and a barrier low enough
#: that friction-driven relaxation converges within a t_max = 50 horizon.
TOY1_REFERENCE = TripleGaussianGroundState(
    a=1.5,
    sigma_plus=0.45,
    sigma_minus=0.55,
    sigma_0=0.5,
    c_plus=1.0,
    c_minus=0.8,
    c_0=0.5,
)


def toy1_ground_state(
    params: TripleGaussianGroundState, grid: Grid1D
) -> WaveFunction:
    """The prescribed mixture, sampled on the grid and normalized."""
    vals = params.value(grid.points())
    if np.any(vals <= 0):
        bad = grid.points()[int(np.argmin(vals))]
        raise PotentialConstructionError(
            f"ground-state ansatz is not positive (value {vals.min():.3e} "
            f"near x={bad:.3f}); adjust mixture coefficients"
        )
    return normalize(WaveFunction(grid, vals.astype(complex)))


def toy1_potential(
    params: TripleGaussianGroundState, nu: float, grid: Grid1D
) -> PotentialField:
    """Potential for which the mixture is an exact zero-energy ground state.

    V(x) = (nu^2 / 2) * phi''(x) / phi(x), with the analytic second
    derivative, so the eigenvalue equation holds to machine precision
    independent of grid resolution.
    """
    if nu <= 0:
        raise ValueError("nu must be positive")
    x = grid.points()
    phi = params.value(x)
    if np.any(phi <= 0):
        raise PotentialConstructionError(
            "ground-state ansatz is not positive on this grid"
        )
    return PotentialField(grid, 0.5 * nu * nu * params.second_derivative(x) / phi)


# ---------------------------------------------------------------------------
# Asymmetric double well
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DoubleWellParams:
    """Piecewise quartic double well with wells at +a_plus / -a_minus.

    V(x) = V0 * (x^2 - a_plus^2)^2  / a_plus^4  + delta * x   for x >= 0
    V(x) = V0 * (x^2 - a_minus^2)^2 / a_minus^4 + delta * x   for x <  0
    """

    a_plus: float
    a_minus: float
    v0: float
    delta: float

    def __post_init__(self):
        if self.a_plus == 0 or self.a_minus == 0:
            raise ValueError("well positions must be nonzero (formula divides by a^4)")
        if self.a_plus < 0 or self.a_minus < 0 or self.v0 <= 0:
            raise ValueError("a_plus, a_minus and v0 must be positive")


def double_well(params: DoubleWellParams, grid: Grid1D) -> PotentialField:
    x = grid.points()
    right = params.v0 * (x * x - params.a_plus**2) ** 2 / params.a_plus**4
    left = params.v0 * (x * x - params.a_minus**2) ** 2 / params.a_minus**4
    return PotentialField(grid, np.where(x >= 0, right, left) + params.delta * x)


# ---------------------------------------------------------------------------
# Chain potentials
# ---------------------------------------------------------------------------


def linear_tilt(g: float, lattice: Lattice) -> PotentialField:
    """V(x) = -g*x for sites x = 1..s; minimum at x = s for g > 0."""
    return PotentialField(lattice, -g * lattice.points())


@dataclass(frozen=True)
class DisorderSpec:
    """Seeded Gaussian site disorder: mean 0, standard deviation sigma.

    Identical (sigma, seed) pairs reproduce the potential bit-for-bit: draws
    come from a PCG64 stream mapped through the inverse normal CDF on 53-bit
    midpoint uniforms, which is deterministic and platform independent.
    """

    sigma: float
    seed: int

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")


def anderson_disorder(spec: DisorderSpec, lattice: Lattice) -> PotentialField:
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    # (k + 0.5) / 2^53 is uniform on midpoints of (0, 1): ndtri never sees 0 or 1.
    u = (rng.integers(0, 1 << 53, size=lattice.s) + 0.5) / float(1 << 53)
    return PotentialField(lattice, spec.sigma * ndtri(u))
