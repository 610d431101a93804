"""Grid propagator for the friction-damped nonlinear Schrodinger dynamics.

The evolution equation on the grid is

    i dpsi/dt = -(nu^2/2) psi'' + V(x) psi + beta * S(t,x) psi,

with S the unwrapped phase of psi.  For beta >= 0 the expected energy
<psi|H|psi> of the linear Hamiltonian H = -(nu^2/2) d^2/dx^2 + V is
nonincreasing along the flow, while the norm is preserved; this is what
drives an initial packet toward the ground state of H.

Scheme: Strang splitting.  The diagonal term (V + beta*S, with S recomputed
from the state at each half-step) is applied as a phase factor; the kinetic
term advances by a Crank-Nicolson implicit step with Dirichlet boundaries
(missing neighbors outside the grid are zero).  The state is renormalized
after every full step.  Global error is O(dt^2).

By default the density-weighted mean of S is subtracted before the friction
term is applied.  That changes only a global phase of psi, leaving the
density and every reported observable invariant, and prevents secular growth
of the accumulated phase.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import impl
from .errors import SimulationDivergedError, StabilityError
from .observables import ObservableSeries, RunResult, Snapshot
from .potentials import PotentialField
from .state import (
    DEFAULT_RHO_FLOOR,
    Grid1D,
    WaveFunction,
    require_same_domain,
    to_density_phase,
)

#: Construction-time guard: the Crank-Nicolson kinetic step is unconditionally
#: stable, so dt is accuracy limited, not stability limited.  Reject time
#: steps whose kinetic phase per step, dt*nu^2/dx^2, is too coarse for the
#: splitting error analysis to mean anything.
MAX_KINETIC_PHASE = 16.0

#: Relative density floor below which the reconstructed effective potential
#: is reported as absent rather than extrapolated.
W_RHO_FLOOR = 1e-6


@dataclass(frozen=True)
class SlkParams:
    """Friction-run parameters for the grid propagator.

    rho_floor is the phase-reliability threshold relative to max(rho); below
    it S is held at the last reliable value.  gauge toggles subtraction of
    the density-weighted mean phase (observable-invariant, on by default).
    """

    nu: float
    beta: float
    dt: float
    t_max: float
    rho_floor: float = DEFAULT_RHO_FLOOR
    gauge: bool = True

    def __post_init__(self):
        if self.nu <= 0:
            raise ValueError("nu must be positive")
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_max < 0:
            raise ValueError("t_max must be nonnegative")
        if not 0 <= self.rho_floor < 1:
            raise ValueError("rho_floor must be in [0, 1)")


def _laplacian(amps: np.ndarray, dx: float) -> np.ndarray:
    """3-point Dirichlet Laplacian (zero outside both ends)."""
    out = -2.0 * amps
    out[:-1] += amps[1:]
    out[1:] += amps[:-1]
    return out / (dx * dx)


def energy(psi: WaveFunction, V: PotentialField, nu: float) -> float:
    """<psi|H|psi> with the same discrete Laplacian the propagator uses."""
    require_same_domain(psi, V)
    grid = psi.domain
    if not isinstance(grid, Grid1D):
        raise TypeError("energy() expects a grid state; chains use lattice_energy")
    hpsi = -(nu * nu / 2) * _laplacian(psi.amplitudes.astype(complex), grid.dx)
    hpsi += V.values * psi.amplitudes
    return float(np.real(np.sum(np.conj(psi.amplitudes) * hpsi)) * grid.dx)


def reconstruct_w(
    psi: WaveFunction,
    nu: float,
    energy_value: float,
    rho_floor: float | None = None,
    return_residual: bool = False,
):
    """Effective potential W = (nu^2 / 2 psi) * lap(psi) + energy_value.

    W is the potential for which the current state is a zero-residual ground
    state with eigenvalue ``energy_value``; its agreement with the true V
    certifies convergence.  Points with density at or below ``rho_floor``
    (relative to max(rho)) are emitted as NaN, since W divides by psi.  The
    real part is returned; with ``return_residual`` the largest imaginary
    part over the reliable region is reported as a diagnostic.
    """
    grid = psi.domain
    if not isinstance(grid, Grid1D):
        raise TypeError("reconstruct_w is defined on grid states")
    if rho_floor is None:
        rho_floor = W_RHO_FLOOR
    rho = psi.density()
    mask = rho > rho_floor * rho.max()
    ratio = np.full(psi.domain.size, np.nan, dtype=complex)
    lap = _laplacian(psi.amplitudes.astype(complex), grid.dx)
    ratio[mask] = lap[mask] / psi.amplitudes[mask]
    w_complex = 0.5 * nu * nu * ratio
    field = PotentialField(
        grid, np.where(mask, w_complex.real + energy_value, np.nan), allow_nan=True
    )
    if return_residual:
        residual = float(np.nanmax(np.abs(w_complex.imag))) if mask.any() else 0.0
        return field, residual
    return field


class _GridStepper:
    """Precomputed Crank-Nicolson factors bound to one (grid, V, params)."""

    def __init__(self, grid: Grid1D, V: PotentialField, params: SlkParams):
        if V.domain != grid:
            raise ValueError("potential domain does not match the grid")
        kinetic_phase = params.dt * params.nu**2 / grid.dx**2
        if kinetic_phase > MAX_KINETIC_PHASE:
            raise StabilityError(
                f"dt*nu^2/dx^2 = {kinetic_phase:.2f} exceeds the guard "
                f"{MAX_KINETIC_PHASE}; reduce dt or refine the grid"
            )
        kd = params.nu**2 / grid.dx**2
        ke = -params.nu**2 / (2 * grid.dx**2)
        self.handle = impl.prepare_tridiag(
            1.0 + 0.5j * params.dt * kd, 0.5j * params.dt * ke, grid.n
        )
        self.bd = 1.0 - 0.5j * params.dt * kd
        self.be = -0.5j * params.dt * ke
        self.grid = grid
        self.V = V
        self.params = params

    def advance(self, psi_arr: np.ndarray, nsteps: int) -> None:
        impl.continuous_chunk(
            psi_arr,
            self.V.values,
            self.params.beta,
            self.params.dt,
            self.grid.dx,
            self.params.rho_floor,
            self.params.gauge,
            nsteps,
            self.handle,
            self.bd,
            self.be,
        )


def slk_step(psi: WaveFunction, V: PotentialField, p: SlkParams) -> WaveFunction:
    """One step of size p.dt; the result is renormalized.

    For beta = 0 this is a plain linear Schrodinger step.
    """
    require_same_domain(psi, V)
    stepper = _GridStepper(psi.domain, V, p)
    work = np.array(psi.amplitudes, dtype=np.complex128)
    stepper.advance(work, 1)
    return WaveFunction(psi.domain, work)


def _check_finite(psi_arr: np.ndarray, t: float) -> None:
    if not np.all(np.isfinite(psi_arr.view(np.float64))):
        raise SimulationDivergedError(
            f"non-finite amplitudes at t = {t:g}; reduce dt or check the setup"
        )


def run_continuous(
    psi0: WaveFunction,
    V: PotentialField,
    p: SlkParams,
    record_every: int = 1,
    reference: WaveFunction | None = None,
    snapshot_times: list[float] | None = None,
) -> RunResult:
    """Iterate slk_step to t_max, recording norm, energy and overlap.

    ``record_every`` sets the series cadence in steps.  ``reference`` (when
    given) adds an overlap column |<reference|psi>|^2.  Snapshots capture the
    density/phase decomposition and the reconstructed effective potential at
    the requested times (rounded to the step grid); default: first and last.
    """
    if record_every < 1:
        raise ValueError("record_every must be a positive integer")
    require_same_domain(psi0, V, reference)
    grid = psi0.domain
    stepper = _GridStepper(grid, V, p)
    nsteps = int(round(p.t_max / p.dt))

    if snapshot_times is None:
        snapshot_times = [0.0, nsteps * p.dt]
    snap_steps = sorted(
        {min(max(int(round(t / p.dt)), 0), nsteps) for t in snapshot_times}
    )

    psi_arr = np.array(psi0.amplitudes, dtype=np.complex128)
    ref_arr = reference.amplitudes if reference is not None else None

    times, norms, energies, overlaps = [], [], [], []
    snapshots: list[Snapshot] = []
    snap_set = set(snap_steps)

    def visit(step: int) -> None:
        t = step * p.dt
        _check_finite(psi_arr, t)
        on_cadence = step % record_every == 0 or step == nsteps
        if not on_cadence and step not in snap_set:
            return
        state = WaveFunction(grid, psi_arr)
        e = energy(state, V, p.nu)
        if on_cadence:
            times.append(t)
            norms.append(state.norm())
            energies.append(e)
            if ref_arr is not None:
                overlaps.append(
                    abs(np.sum(np.conj(ref_arr) * psi_arr) * grid.dx) ** 2
                )
        if step in snap_set:
            snapshots.append(
                Snapshot(
                    t,
                    to_density_phase(state, p.rho_floor),
                    reconstruct_w(state, p.nu, e),
                )
            )

    visit(0)
    step = 0
    while step < nsteps:
        boundaries = [((step // record_every) + 1) * record_every, nsteps]
        boundaries += [s for s in snap_steps if s > step]
        target = min(b for b in boundaries if b > step)
        stepper.advance(psi_arr, target - step)
        step = target
        visit(step)

    series = ObservableSeries(
        times=np.asarray(times),
        norm=np.asarray(norms),
        energy=np.asarray(energies),
        overlap=np.asarray(overlaps) if ref_arr is not None else None,
    )
    return RunResult(WaveFunction(grid, psi_arr), series, snapshots)
