import numpy as np
import pytest

from slksim import (
    Grid1D,
    SimulationDivergedError,
    SlkParams,
    StabilityError,
    WaveFunction,
    energy,
    ground_state,
    normalize,
    propagate_linear,
    reconstruct_w,
    run_continuous,
    slk_step,
)
from slksim.potentials import (
    TOY1_REFERENCE,
    tabulated,
    toy1_ground_state,
    toy1_potential,
)


def gaussian_state(grid, center=0.0, width=1.0, momentum=0.0):
    x = grid.points()
    amps = np.exp(-((x - center) ** 2) / (4 * width**2) + 1j * momentum * x)
    return normalize(WaveFunction(grid, amps))


class TestParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            SlkParams(nu=0.0, beta=0.1, dt=1e-3, t_max=1.0)
        with pytest.raises(ValueError):
            SlkParams(nu=1.0, beta=-0.1, dt=1e-3, t_max=1.0)
        with pytest.raises(ValueError):
            SlkParams(nu=1.0, beta=0.1, dt=0.0, t_max=1.0)
        with pytest.raises(ValueError):
            SlkParams(nu=1.0, beta=0.1, dt=1e-3, t_max=1.0, rho_floor=1.5)

    def test_stability_guard_at_construction(self):
        grid = Grid1D(-10.0, 10.0, 1024)
        psi = gaussian_state(grid)
        V = tabulated(grid, np.zeros(grid.n))
        bad = SlkParams(nu=1.0, beta=0.0, dt=0.1, t_max=1.0)  # dt*nu^2/dx^2 ~ 262
        with pytest.raises(StabilityError):
            slk_step(psi, V, bad)


class TestLinearLimit:
    def test_stationary_box_ground_state(self):
        # beta=0, V=0: the discrete box ground state only rotates its phase
        grid = Grid1D(0.0, 1.0, 64)
        V = tabulated(grid, np.zeros(64))
        psi = ground_state(V, 1.0).ground_state
        p = SlkParams(nu=1.0, beta=0.0, dt=1e-3, t_max=0.1)
        rho0 = psi.density()
        state = psi
        for _ in range(100):
            state = slk_step(state, V, p)
        assert np.max(np.abs(state.density() - rho0)) < 1e-6

    def test_energy_conserved(self):
        grid = Grid1D(-10.0, 10.0, 128)
        x = grid.points()
        V = tabulated(grid, 0.05 * x**2)
        psi = gaussian_state(grid, center=1.5, width=1.2)
        p = SlkParams(nu=1.0, beta=0.0, dt=2e-3, t_max=10.0)
        run = run_continuous(psi, V, p, record_every=500)
        e = run.series.energy
        assert np.max(np.abs(e - e[0])) / abs(e[0]) < 1e-6

    def test_matches_exact_propagation(self):
        grid = Grid1D(-10.0, 10.0, 64)
        x = grid.points()
        V = tabulated(grid, 0.1 * x**2)
        psi = gaussian_state(grid, center=1.0)
        p = SlkParams(nu=1.0, beta=0.0, dt=1e-3, t_max=1.0)
        run = run_continuous(psi, V, p, record_every=1000)
        exact = propagate_linear(psi, V, 1.0, 1.0)
        err = np.sqrt(np.sum(np.abs(run.final_state.amplitudes - exact.amplitudes) ** 2) * grid.dx)
        assert err < 1e-5


class TestFriction:
    def test_energy_monotone(self):
        grid = Grid1D(-8.0, 8.0, 256)
        V = toy1_potential(TOY1_REFERENCE, 1.0, grid)
        psi = gaussian_state(grid, center=-1.5, width=0.55)
        p = SlkParams(nu=1.0, beta=0.5, dt=1e-3, t_max=5.0)
        run = run_continuous(psi, V, p, record_every=100)
        assert np.all(np.diff(run.series.energy) <= 1e-8)

    def test_norm_preserved(self):
        grid = Grid1D(-8.0, 8.0, 256)
        V = toy1_potential(TOY1_REFERENCE, 1.0, grid)
        psi = gaussian_state(grid, center=-1.5, width=0.55)
        p = SlkParams(nu=1.0, beta=0.5, dt=1e-3, t_max=2.0)
        run = run_continuous(psi, V, p, record_every=200)
        assert np.max(np.abs(run.series.norm - 1.0)) < 1e-6

    def test_gauge_invariance_of_density(self):
        grid = Grid1D(-8.0, 8.0, 128)
        V = toy1_potential(TOY1_REFERENCE, 1.0, grid)
        p = SlkParams(nu=1.0, beta=0.4, dt=1e-3, t_max=0.5)
        psi = gaussian_state(grid, center=-1.5, width=0.55, momentum=0.3)
        rotated = WaveFunction(grid, psi.amplitudes * np.exp(1j * 1.23))
        run_a = run_continuous(psi, V, p, record_every=100)
        run_b = run_continuous(rotated, V, p, record_every=100)
        assert np.max(np.abs(run_a.final_state.density() - run_b.final_state.density())) < 1e-8

    def test_beta_zero_step_is_linear(self):
        # slk_step with beta=0 equals the pure Schrodinger splitting step
        grid = Grid1D(-5.0, 5.0, 64)
        x = grid.points()
        V = tabulated(grid, x**2)
        psi = gaussian_state(grid, momentum=1.0)
        p0 = SlkParams(nu=1.0, beta=0.0, dt=1e-3, t_max=1.0)
        stepped = slk_step(psi, V, p0)
        exact = propagate_linear(psi, V, 1.0, 1e-3)
        assert np.max(np.abs(stepped.amplitudes - exact.amplitudes)) < 1e-8


class TestEnergy:
    def test_constant_shift(self):
        grid = Grid1D(-5.0, 5.0, 128)
        x = grid.points()
        psi = gaussian_state(grid, width=0.8)
        V0 = tabulated(grid, 0.3 * x**2)
        Vc = tabulated(grid, 0.3 * x**2 + 2.5)
        e0 = energy(psi, V0, 1.0)
        ec = energy(psi, Vc, 1.0)
        assert ec - e0 == pytest.approx(2.5, abs=1e-10)

    def test_free_broad_state_kinetic_sign(self):
        # V=0: only the kinetic term remains; for a broad packet it is
        # small, positive, and close to the nu^2/(8 sigma^2) closed form
        grid = Grid1D(-10.0, 10.0, 201)
        V = tabulated(grid, np.zeros(201))
        psi = gaussian_state(grid, width=2.0)
        e = energy(psi, V, 1.0)
        assert 0 < e < 0.05
        assert e == pytest.approx(1.0 / (8 * 4.0), rel=1e-3)

    def test_reference_ground_state_energy(self):
        grid = Grid1D(-10.0, 10.0, 1024)
        V = toy1_potential(TOY1_REFERENCE, 1.0, grid)
        phi = toy1_ground_state(TOY1_REFERENCE, grid)
        assert abs(energy(phi, V, 1.0)) < 1e-4


class TestReconstructW:
    def test_inverts_toy1_potential(self):
        # fine grid so the finite-difference Laplacian error stays below 1e-3
        grid = Grid1D(-6.0, 6.0, 4096)
        V = toy1_potential(TOY1_REFERENCE, 1.0, grid).values
        phi = toy1_ground_state(TOY1_REFERENCE, grid)
        W = reconstruct_w(phi, 1.0, 0.0, rho_floor=1e-3).values
        mask = ~np.isnan(W)
        assert mask.sum() > 100
        assert np.max(np.abs(W[mask] - V[mask])) < 1e-3

    def test_gaussian_closed_form(self):
        sigma, nu = 0.7, 1.0
        grid = Grid1D(-6.0, 6.0, 4096)
        psi = gaussian_state(grid, width=sigma)
        e_val = 0.37
        W, residual = reconstruct_w(psi, nu, e_val, rho_floor=1e-3, return_residual=True)
        x = grid.points()
        expected = (nu**2 / 2) * (x**2 / (4 * sigma**4) - 1 / (2 * sigma**2)) + e_val
        mask = ~np.isnan(W.values)
        assert np.max(np.abs(W.values[mask] - expected[mask])) < 1e-3
        assert residual < 1e-10  # real state: no imaginary part

    def test_low_density_marked_absent(self):
        grid = Grid1D(-6.0, 6.0, 512)
        psi = gaussian_state(grid, width=0.5)
        W = reconstruct_w(psi, 1.0, 0.0).values
        assert np.isnan(W[0]) and np.isnan(W[-1])
        assert not np.isnan(W[256])


class TestRunControl:
    def test_zero_horizon_returns_initial(self):
        grid = Grid1D(-5.0, 5.0, 64)
        V = tabulated(grid, np.zeros(64))
        psi = gaussian_state(grid)
        p = SlkParams(nu=1.0, beta=0.3, dt=1e-3, t_max=0.0)
        run = run_continuous(psi, V, p)
        assert np.array_equal(run.final_state.amplitudes, psi.amplitudes)
        assert run.series.times.size == 1

    def test_record_cadence_and_snapshots(self):
        grid = Grid1D(-5.0, 5.0, 64)
        V = tabulated(grid, np.zeros(64))
        psi = gaussian_state(grid)
        p = SlkParams(nu=1.0, beta=0.1, dt=1e-3, t_max=0.05)
        run = run_continuous(psi, V, p, record_every=10, snapshot_times=[0.0, 0.025, 0.05])
        assert run.series.times.size == 6  # 0, 10, 20, 30, 40, 50 steps
        assert len(run.snapshots) == 3
        assert run.snapshots[1].time == pytest.approx(0.025)
        assert run.snapshots[1].w is not None

    def test_overlap_column_present_with_reference(self):
        grid = Grid1D(-5.0, 5.0, 64)
        V = tabulated(grid, np.zeros(64))
        psi = gaussian_state(grid)
        p = SlkParams(nu=1.0, beta=0.0, dt=1e-3, t_max=0.01)
        run = run_continuous(psi, V, p, record_every=5, reference=psi)
        assert run.series.overlap is not None
        assert run.series.overlap[0] == pytest.approx(1.0, abs=1e-12)

    def test_nan_detection_aborts(self):
        grid = Grid1D(-5.0, 5.0, 64)
        V = tabulated(grid, np.zeros(64))
        amps = np.ones(64, complex)
        amps[3] = np.nan
        psi = WaveFunction(grid, amps)
        p = SlkParams(nu=1.0, beta=0.0, dt=1e-3, t_max=0.01)
        with pytest.raises(SimulationDivergedError):
            run_continuous(psi, V, p)
