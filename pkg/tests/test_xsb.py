import numpy as np
import pytest

from xsblab.errors import WindowError
from xsblab.params import PhaseParams, SpaceTimeGrid
from xsblab.spectral import phase_symbol, spacetime_to_spectrum
from xsblab.xsb import TimeWindow, XsbIndex, apply_time_window, smooth_cutoff, xsb_norm


@pytest.fixture
def grid():
    return SpaceTimeGrid(L=32.0, Nx=64, T_span=16.0, Nt=128)


@pytest.fixture
def params():
    return PhaseParams(alpha=0.0, beta=1.0)


def rand_field(grid, seed=0):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((grid.Nx, grid.Nt)) + 1j * rng.standard_normal((grid.Nx, grid.Nt))


class TestSmoothCutoff:
    def test_plateaus_exact(self):
        t = np.array([-0.5, 0.0, 0.99, 1.0])
        assert np.all(smooth_cutoff(t) == 1.0)
        assert np.all(smooth_cutoff(np.array([2.0, 2.5, -3.0])) == 0.0)

    def test_range_and_monotone(self):
        t = np.linspace(1.0, 2.0, 500)
        v = smooth_cutoff(t)
        assert np.all(v <= 1.0) and np.all(v >= 0.0)
        assert np.all(np.diff(v) <= 1e-12)

    def test_smooth_at_junctions(self):
        # numerical derivative stays small near |t| = 1 and |t| = 2
        for t0 in (1.0, 2.0):
            h = 1e-4
            d = (smooth_cutoff(t0 + h) - smooth_cutoff(t0 - h)) / (2 * h)
            assert abs(d) < 0.05


class TestXsbIndex:
    def test_rho(self):
        assert XsbIndex(-0.2, 0.75).rho == pytest.approx(0.2)
        assert XsbIndex(0.0, 0.75).rho == 0.0

    def test_trilinear_window(self):
        assert XsbIndex(-0.2, 0.75).validate_trilinear() == []
        assert XsbIndex(-0.3, 0.75).validate_trilinear()
        assert XsbIndex(-0.2, 0.5).validate_trilinear()

    def test_duhamel_window(self):
        assert XsbIndex(0.0, 0.7, -0.2).validate_duhamel() == []
        assert XsbIndex(0.0, 0.9, -0.2).validate_duhamel()


class TestXsbNorm:
    def test_zero_field(self, grid, params):
        assert xsb_norm(np.zeros((grid.Nx, grid.Nt)), XsbIndex(0.3, 0.75), params, grid) == 0.0

    def test_equals_spacetime_l2_at_zero_indices(self, grid, params):
        U = rand_field(grid, 1)
        F = spacetime_to_spectrum(U, grid)
        lhs = xsb_norm(F, XsbIndex(0.0, 0.0), params, grid)
        rhs = np.sqrt(np.sum(np.abs(U) ** 2) * grid.dx * grid.dt)
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_absolute_homogeneity(self, grid, params):
        F = rand_field(grid, 2)
        idx = XsbIndex(-0.2, 0.75)
        c = -2.7 + 1.3j
        assert xsb_norm(c * F, idx, params, grid) == pytest.approx(
            abs(c) * xsb_norm(F, idx, params, grid), rel=1e-13
        )

    def test_monotone_in_b_off_curve(self, grid, params):
        # support away from the characteristic: |tau - phi(xi)| >= 1 everywhere
        mod = np.abs(grid.tau[None, :] - phase_symbol(grid.xi, params)[:, None])
        F = rand_field(grid, 3) * (mod >= 1.0)
        idx = XsbIndex(0.0, 0.0)
        vals = [xsb_norm(F, idx, params, grid, b=b) for b in (0.0, 0.3, 0.6, 0.9)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_free_solution_b_insensitive(self, grid, params):
        # mass exactly on the lattice point nearest the curve: modulations < 1,
        # so raising b changes the norm by at most the bracket cap 2^b
        F = np.zeros((grid.Nx, grid.Nt))
        phi = phase_symbol(grid.xi, params)
        rng = np.random.default_rng(4)
        for k in range(grid.Nx):
            mdist = np.abs(grid.tau - phi[k])
            mmin = mdist.min()
            if mmin <= 1.0:
                F[k, np.argmin(mdist)] = rng.random()
        idx = XsbIndex(0.0, 0.0)
        r = xsb_norm(F, idx, params, grid, b=0.9) / xsb_norm(F, idx, params, grid, b=0.0)
        assert 1.0 <= r <= 2.0**0.9 + 1e-12


class TestTimeWindow:
    def test_none_is_identity(self, grid):
        U = rand_field(grid, 5)
        out = apply_time_window(U, TimeWindow(kind="none"), grid)
        assert np.array_equal(out, U)

    def test_unit_plateau_and_support(self, grid):
        U = np.ones((grid.Nx, grid.Nt), dtype=complex)
        out = apply_time_window(U, TimeWindow(T=1.0), grid)
        inside = np.abs(grid.t) <= 1.0
        outside = np.abs(grid.t) >= 2.0
        assert np.allclose(out[:, inside], 1.0)
        assert np.all(out[:, outside] == 0.0)
        # constant-in-time field reproduces the window profile itself
        assert np.allclose(out[0], TimeWindow(T=1.0).profile(grid.t))

    def test_l2_contraction(self, grid):
        U = rand_field(grid, 6)
        out = apply_time_window(U, TimeWindow(T=2.0), grid)
        assert np.sum(np.abs(out) ** 2) <= np.sum(np.abs(U) ** 2)

    def test_too_wide_rejected(self, grid):
        with pytest.raises(WindowError):
            apply_time_window(rand_field(grid), TimeWindow(T=grid.T_span / 2.0), grid)
