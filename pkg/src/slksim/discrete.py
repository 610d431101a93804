"""Chain propagator: continuous-time quantum walk with cumulative-sine friction.

The generator on the open chain of sites 1..s is

    i dpsi(t,x)/dt = -(1/2)(psi(t,x+1) + psi(t,x-1)) + V(x) psi(t,x)
                     + K(t,x) psi(t,x),

missing neighbors treated as zero, with the site-diagonal friction field

    K(t,x) = beta * sum_{y=2..x} sin(S(t,y) - S(t,y-1)),    K(t,1) = 0.

K is real, so the flow preserves the norm, and it is built so that the
expected hopping-plus-potential energy <psi|h|psi> satisfies

    d/dt <h> = -beta * sum_x sqrt(rho(x+1) rho(x)) sin^2(S(x+1) - S(x)) <= 0.

Phase differences are always computed from pairwise products
Arg(psi(y) conj(psi(y-1))), never from a globally unwrapped phase: the sine
is 2pi-periodic, so this form is exact and branch-cut free.  A term touching
a site with density below ``AMP_FLOOR`` contributes zero (the sqrt(rho rho)
factor shows such terms carry no energy flux).

Time stepping mirrors the grid module: symmetric splitting with the friction
field recomputed from the state at each diagonal half-step and a
Crank-Nicolson hopping step, renormalizing each full step; global O(dt^2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import impl, pyref
from .errors import SimulationDivergedError
from .observables import ObservableSeries, RunResult
from .potentials import PotentialField
from .state import Lattice, WaveFunction, require_same_domain

#: Absolute density below which a site's phase is treated as undefined.
AMP_FLOOR = 1e-30

#: Tolerated norm deviation at recorded times (the norm monitor).
NORM_TOL = 1e-6


@dataclass(frozen=True)
class DiscreteSlkParams:
    """Friction strength, step size and horizon for chain runs."""

    beta: float
    dt: float
    t_max: float

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_max < 0:
            raise ValueError("t_max must be nonnegative")


@dataclass(frozen=True)
class SinePacket:
    """Windowed sine packet on sites 1..epsilon with mode number k.

    Unit l2 norm by the sine orthonormality on 1..epsilon; for k around
    (epsilon-1)/2 the packet moves ballistically with speed close to 1.
    """

    epsilon: int
    k: int

    def __post_init__(self):
        if self.epsilon < 1:
            raise ValueError("epsilon must be a positive integer")
        if not 1 <= self.k <= self.epsilon:
            raise ValueError("k must satisfy 1 <= k <= epsilon")


def sine_packet(spec: SinePacket, lattice: Lattice) -> WaveFunction:
    """psi(x) = sqrt(2/(eps+1)) sin(k pi x / (eps+1)) on sites 1..eps, else 0."""
    if spec.epsilon >= lattice.s:
        raise ValueError(
            f"packet support epsilon={spec.epsilon} must be smaller than s={lattice.s}"
        )
    amps = np.zeros(lattice.s, dtype=complex)
    x = np.arange(1, spec.epsilon + 1)
    amps[: spec.epsilon] = np.sqrt(2.0 / (spec.epsilon + 1)) * np.sin(
        spec.k * np.pi * x / (spec.epsilon + 1)
    )
    return WaveFunction(lattice, amps)


def kostin_field(psi: WaveFunction, beta: float) -> np.ndarray:
    """The friction field K over sites 1..s (K[0] = 0, |K[x+1]-K[x]| <= beta)."""
    if not isinstance(psi.domain, Lattice):
        raise TypeError("kostin_field is defined on lattice states")
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    return pyref.kostin_values(psi.amplitudes, psi.density(), beta, AMP_FLOOR)


def lattice_energy(psi: WaveFunction, V: PotentialField) -> float:
    """<psi|h|psi> for the open chain with hopping -1/2 and potential V."""
    require_same_domain(psi, V)
    amps = psi.amplitudes
    hop = -float(np.sum(np.real(np.conj(amps[1:]) * amps[:-1])))
    return hop + float(np.sum(V.values * psi.density()))


def dissipation_rate(psi: WaveFunction, beta: float) -> float:
    """Instantaneous d/dt <h> under the friction flow; always <= 0.

    Evaluates -beta * sum sqrt(rho(x+1) rho(x)) sin^2(S(x+1)-S(x)), which is
    the energy-balance identity specialized to the cumulative-sine field.
    """
    if not isinstance(psi.domain, Lattice):
        raise TypeError("dissipation_rate is defined on lattice states")
    rho = psi.density()
    amps = psi.amplitudes
    dphi = np.angle(amps[1:] * np.conj(amps[:-1]))
    ok = (rho[1:] > AMP_FLOOR) & (rho[:-1] > AMP_FLOOR)
    terms = np.sqrt(rho[1:] * rho[:-1]) * np.sin(dphi) ** 2
    return float(-beta * np.sum(terms[ok]))


class _ChainStepper:
    """Precomputed Crank-Nicolson hopping factors for one (lattice, V, params)."""

    def __init__(self, lattice: Lattice, V: PotentialField, params: DiscreteSlkParams):
        if V.domain != lattice:
            raise ValueError("potential domain does not match the lattice")
        # hopping operator has zero diagonal and -1/2 off-diagonal
        self.handle = impl.prepare_tridiag(1.0 + 0.0j, -0.25j * params.dt, lattice.s)
        self.bd = 1.0 + 0.0j
        self.be = 0.25j * params.dt
        self.lattice = lattice
        self.V = V
        self.params = params

    def advance(self, psi_arr: np.ndarray, nsteps: int) -> None:
        impl.discrete_chunk(
            psi_arr,
            self.V.values,
            self.params.beta,
            self.params.dt,
            AMP_FLOOR,
            nsteps,
            self.handle,
            self.bd,
            self.be,
        )


def discrete_step(
    psi: WaveFunction, V: PotentialField, p: DiscreteSlkParams
) -> WaveFunction:
    """One step of size p.dt on the chain; the result is renormalized."""
    require_same_domain(psi, V)
    stepper = _ChainStepper(psi.domain, V, p)
    work = np.array(psi.amplitudes, dtype=np.complex128)
    stepper.advance(work, 1)
    return WaveFunction(psi.domain, work)


def _check_state(psi_arr: np.ndarray, t: float) -> float:
    if not np.all(np.isfinite(psi_arr.view(np.float64))):
        raise SimulationDivergedError(
            f"non-finite amplitudes at t = {t:g}; reduce dt or check the setup"
        )
    nrm = float(np.linalg.norm(psi_arr))
    if abs(nrm - 1.0) > NORM_TOL:
        raise SimulationDivergedError(
            f"norm drifted to {nrm:.8f} at t = {t:g} (monitor tolerance {NORM_TOL})"
        )
    return nrm


def run_discrete(
    psi0: WaveFunction,
    V: PotentialField,
    p: DiscreteSlkParams,
    record_every: int = 1,
    delta: int | None = None,
) -> RunResult:
    """Full chain trajectory: norm, energy, arrival probability, density map.

    ``delta`` is the width of the arrival window (the delta rightmost sites);
    one density row is stored per recorded time, forming the space-time map.
    """
    if record_every < 1:
        raise ValueError("record_every must be a positive integer")
    require_same_domain(psi0, V)
    lattice = psi0.domain
    if delta is not None and not 0 < delta < lattice.s:
        raise ValueError(f"delta must be in 1..{lattice.s - 1}, got {delta}")
    stepper = _ChainStepper(lattice, V, p)
    nsteps = int(round(p.t_max / p.dt))

    psi_arr = np.array(psi0.amplitudes, dtype=np.complex128)
    times, norms, energies, arrivals, rows = [], [], [], [], []

    def record(step: int) -> None:
        t = step * p.dt
        nrm = _check_state(psi_arr, t)
        rho = np.abs(psi_arr) ** 2
        times.append(t)
        norms.append(nrm)
        hop = -float(np.sum(np.real(np.conj(psi_arr[1:]) * psi_arr[:-1])))
        energies.append(hop + float(np.dot(V.values, rho)))
        if delta is not None:
            arrivals.append(float(np.sum(rho[lattice.s - delta :])))
        rows.append(rho)

    record(0)
    step = 0
    while step < nsteps:
        target = min(((step // record_every) + 1) * record_every, nsteps)
        stepper.advance(psi_arr, target - step)
        step = target
        record(step)

    series = ObservableSeries(
        times=np.asarray(times),
        norm=np.asarray(norms),
        energy=np.asarray(energies),
        arrival_prob=np.asarray(arrivals) if delta is not None else None,
    )
    return RunResult(
        WaveFunction(lattice, psi_arr),
        series,
        density_times=np.asarray(times),
        density_map=np.asarray(rows),
    )
