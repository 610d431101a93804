import numpy as np
import pytest

from slksim import (
    DegenerateStateError,
    DomainMismatchError,
    Grid1D,
    Lattice,
    WaveFunction,
    inner,
    normalize,
    to_density_phase,
)


def grid_state(grid, amps):
    return WaveFunction(grid, np.asarray(amps, dtype=complex))


class TestDomains:
    def test_grid_spacing_and_points(self):
        g = Grid1D(-1.0, 3.0, 5)
        assert g.dx == pytest.approx(1.0)
        assert np.allclose(g.points(), [-1.0, 0.0, 1.0, 2.0, 3.0])

    def test_grid_point_mapping(self):
        g = Grid1D(-10.0, 10.0, 1024)
        x = g.points()
        i = np.arange(g.n)
        assert np.allclose(x, g.x_min + i * g.dx, atol=1e-12)

    def test_grid_invariants(self):
        with pytest.raises(ValueError):
            Grid1D(1.0, 1.0, 10)
        with pytest.raises(ValueError):
            Grid1D(0.0, 1.0, 2)

    def test_lattice(self):
        lat = Lattice(4)
        assert lat.size == 4
        assert np.allclose(lat.points(), [1, 2, 3, 4])
        with pytest.raises(ValueError):
            Lattice(0)


class TestWaveFunction:
    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            WaveFunction(Lattice(3), np.zeros(4, complex))

    def test_immutable(self):
        psi = grid_state(Grid1D(0, 1, 5), np.ones(5))
        with pytest.raises(ValueError):
            psi.amplitudes[0] = 2.0

    def test_norm_weighting(self):
        # same amplitudes, different domain weight
        amps = np.ones(101)
        lattice_norm = WaveFunction(Lattice(101), amps.astype(complex)).norm()
        grid_norm = grid_state(Grid1D(0, 1, 101), amps).norm()
        assert lattice_norm == pytest.approx(np.sqrt(101))
        assert grid_norm == pytest.approx(np.sqrt(101 * 0.01))


class TestNormalize:
    def test_lattice_scaling(self):
        psi = WaveFunction(Lattice(4), np.array([2, 0, 0, 0], dtype=complex))
        out = normalize(psi)
        assert np.allclose(out.amplitudes, [1, 0, 0, 0])

    def test_grid_constant(self):
        # constant amplitude on [0,1] normalizes to a constant close to 1;
        # with plain dx weighting the exact value is (n*dx)^(-1/2)
        g = Grid1D(0.0, 1.0, 101)
        out = normalize(grid_state(g, np.full(101, 3.7)))
        assert np.ptp(out.amplitudes.real) == 0.0
        assert out.amplitudes[0].real == pytest.approx(1.0 / np.sqrt(101 * 0.01), abs=1e-12)
        assert out.amplitudes[0].real == pytest.approx(1.0, abs=5e-3)
        assert out.norm() == pytest.approx(1.0, abs=1e-12)

    def test_zero_norm_errors(self):
        psi = WaveFunction(Lattice(3), np.zeros(3, complex))
        with pytest.raises(DegenerateStateError, match="degenerate state"):
            normalize(psi)

    def test_direction_unchanged(self):
        rng = np.random.default_rng(0)
        amps = rng.normal(size=8) + 1j * rng.normal(size=8)
        psi = WaveFunction(Lattice(8), amps)
        out = normalize(psi)
        ratio = out.amplitudes / amps
        assert np.allclose(ratio, ratio[0])
        assert ratio[0].real > 0 and abs(ratio[0].imag) < 1e-15


class TestInner:
    def test_self_inner_is_one(self):
        rng = np.random.default_rng(1)
        for domain in (Lattice(30), Grid1D(-2, 2, 30)):
            amps = rng.normal(size=30) + 1j * rng.normal(size=30)
            psi = normalize(WaveFunction(domain, amps))
            assert inner(psi, psi) == pytest.approx(1.0, abs=1e-12)

    def test_basis_orthogonality(self):
        lat = Lattice(4)
        e1 = WaveFunction(lat, np.array([1, 0, 0, 0], complex))
        e2 = WaveFunction(lat, np.array([0, 1, 0, 0], complex))
        assert inner(e1, e2) == 0

    def test_phase_linearity(self):
        rng = np.random.default_rng(2)
        amps = rng.normal(size=16) + 1j * rng.normal(size=16)
        psi = normalize(WaveFunction(Lattice(16), amps))
        for alpha in (0.3, -1.2, 2.9):
            rotated = WaveFunction(psi.domain, psi.amplitudes * np.exp(1j * alpha))
            assert inner(psi, rotated) == pytest.approx(np.exp(1j * alpha), abs=1e-12)
            assert abs(inner(psi, rotated)) == pytest.approx(1.0, abs=1e-12)

    def test_conjugate_linear_first_argument(self):
        rng = np.random.default_rng(3)
        lat = Lattice(10)
        a = normalize(WaveFunction(lat, rng.normal(size=10) + 1j * rng.normal(size=10)))
        b = normalize(WaveFunction(lat, rng.normal(size=10) + 1j * rng.normal(size=10)))
        c = 0.7 - 0.4j
        scaled = WaveFunction(lat, c * a.amplitudes)
        assert inner(scaled, b) == pytest.approx(np.conj(c) * inner(a, b), abs=1e-12)

    def test_domain_mismatch(self):
        a = WaveFunction(Lattice(3), np.ones(3, complex))
        b = WaveFunction(Lattice(4), np.ones(4, complex))
        with pytest.raises(DomainMismatchError):
            inner(a, b)


class TestDensityPhase:
    def test_real_positive_phase_zero(self):
        g = Grid1D(-3, 3, 64)
        psi = normalize(grid_state(g, np.exp(-g.points() ** 2)))
        dp = to_density_phase(psi)
        assert np.all(dp.phase == 0.0)

    def test_global_phase(self):
        g = Grid1D(-3, 3, 64)
        psi = normalize(
            WaveFunction(g, np.exp(1j * 0.3) * np.exp(-g.points() ** 2))
        )
        dp = to_density_phase(psi)
        assert np.allclose(dp.phase, 0.3, atol=1e-12)

    def test_plane_wave_unwrap(self):
        # e^{ipx} sampled with p*dx = 0.1 on 100 points: the unwrapped phase
        # grows linearly to 9.9 total with no 2pi jumps
        g = Grid1D(0.0, 99.0, 100)
        p = 0.1 / g.dx
        psi = normalize(WaveFunction(g, np.exp(1j * p * g.points())))
        dp = to_density_phase(psi)
        diffs = np.diff(dp.phase)
        assert np.allclose(diffs, 0.1, atol=1e-10)
        assert dp.phase[-1] - dp.phase[0] == pytest.approx(9.9, abs=1e-9)
        assert np.abs(diffs).max() < np.pi

    def test_phase_held_across_dead_zone(self):
        # two lobes with different phases separated by a numerically dead gap
        g = Grid1D(-8, 8, 161)
        x = g.points()
        amps = np.exp(-((x + 4) ** 2)) * np.exp(1j * 0.5)
        amps += np.exp(-((x - 4) ** 2)) * np.exp(1j * 2.5)
        psi = normalize(WaveFunction(g, amps))
        dp = to_density_phase(psi, rho_floor=1e-6)
        rho = psi.density()
        gap = rho <= 1e-6 * rho.max()
        # across the gap the phase holds the last reliable value on the left
        held = dp.phase[gap & (x > -4) & (x < 4)]
        assert np.all(np.isfinite(held))
        assert np.allclose(held, 0.5, atol=1e-9)

    def test_recombination_property(self):
        rng = np.random.default_rng(4)
        g = Grid1D(-5, 5, 200)
        envelope = np.exp(-g.points() ** 2 / 4)
        amps = envelope * np.exp(1j * rng.normal(scale=0.8, size=200)).cumprod()
        psi = normalize(WaveFunction(g, amps))
        dp = to_density_phase(psi)
        rebuilt = np.sqrt(dp.rho) * np.exp(1j * dp.phase)
        rho = psi.density()
        mask = rho > 1e-12 * rho.max()
        err = np.abs(rebuilt[mask] - psi.amplitudes[mask]) / np.abs(psi.amplitudes[mask])
        assert err.max() < 1e-8

    def test_parseval_property(self):
        rng = np.random.default_rng(5)
        for domain in (Lattice(64), Grid1D(-1, 1, 64)):
            amps = rng.normal(size=64) + 1j * rng.normal(size=64)
            psi = WaveFunction(domain, amps)
            dp = to_density_phase(normalize(psi))
            assert np.sum(dp.rho) * domain.weight == pytest.approx(1.0, abs=1e-10)
