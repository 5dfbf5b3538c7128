"""Property-based checks of the algebraic invariants."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from xsblab.counterexample import _sum_band_area, fit_scaling_exponent
from xsblab.params import PhaseParams, SpaceTimeGrid
from xsblab.spectral import bracket, phase_symbol, sobolev_norm, to_spectrum
from xsblab.xsb import XsbIndex, smooth_cutoff, xsb_norm

finite = st.floats(min_value=-50, max_value=50, allow_nan=False)
small_grid = SpaceTimeGrid(L=8.0, Nx=16, T_span=4.0, Nt=16)
std = PhaseParams(alpha=0.0, beta=1.0)


@given(finite)
def test_bracket_floor_and_symmetry(x):
    assert bracket(x) >= 1.0
    assert bracket(x) == bracket(-x)


@given(finite, st.floats(min_value=-3, max_value=3), st.floats(min_value=-3, max_value=3).filter(lambda b: abs(b) > 1e-3))
def test_phase_symbol_parity_split(xi, alpha, beta):
    p = PhaseParams(alpha, beta)
    even = 0.5 * (phase_symbol(xi, p) + phase_symbol(-xi, p))
    odd = 0.5 * (phase_symbol(xi, p) - phase_symbol(-xi, p))
    assert np.isclose(even, alpha * xi**2, rtol=1e-9, atol=1e-7)
    assert np.isclose(odd, beta * xi**3, rtol=1e-9, atol=1e-7)


@given(st.floats(min_value=0.1, max_value=4.0), st.integers(min_value=0, max_value=2**31 - 1))
@settings(max_examples=25)
def test_xsb_norm_homogeneity(scale, seed):
    rng = np.random.default_rng(seed)
    F = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
    idx = XsbIndex(-0.2, 0.75)
    a = xsb_norm(scale * F, idx, std, small_grid)
    b = scale * xsb_norm(F, idx, std, small_grid)
    assert np.isclose(a, b, rtol=1e-12)


@given(st.floats(min_value=-3.0, max_value=3.0), st.floats(min_value=0.05, max_value=4.0))
@settings(max_examples=50)
def test_scaling_fit_recovers_exact_power(c, p):
    pts = [(n, np.exp(c) * float(n) ** p) for n in (8, 16, 32, 64, 128)]
    rep = fit_scaling_exponent(pts)
    assert abs(rep.slope - p) < 1e-7
    assert rep.stderr < 1e-6


@given(st.floats(min_value=-6, max_value=6))
def test_band_area_matches_monte_carlo(q):
    got = float(_sum_band_area(np.array([q]))[0])
    rng = np.random.default_rng(12345)
    m1 = rng.uniform(-1, 1, 40000)
    m2 = rng.uniform(-1, 1, 40000)
    mc = 4.0 * np.mean(np.abs(m1 + m2 - q) <= 1.0)
    assert abs(got - mc) < 0.06
    assert 0.0 <= got <= 4.0


@given(st.floats(min_value=-5, max_value=5))
def test_cutoff_range(t):
    v = float(smooth_cutoff(t))
    assert 0.0 <= v <= 1.0
    if abs(t) <= 1.0:
        assert v == 1.0
    if abs(t) >= 2.0:
        assert v == 0.0


@given(st.integers(min_value=0, max_value=2**31 - 1), st.floats(min_value=-1.0, max_value=1.5))
@settings(max_examples=25)
def test_parseval_any_s_zero_weight(seed, s):
    # at s=0 the weighted lattice norm is the physical L^2 norm, for any data
    rng = np.random.default_rng(seed)
    u = rng.standard_normal(small_grid.Nx) + 1j * rng.standard_normal(small_grid.Nx)
    nrm = sobolev_norm(to_spectrum(u, small_grid), 0.0, small_grid)
    phys = np.sqrt(small_grid.dx * np.sum(np.abs(u) ** 2))
    assert np.isclose(nrm, phys, rtol=1e-12)
    # and the s-weighted norm dominates it for s >= 0, is dominated for s <= 0
    ns = sobolev_norm(to_spectrum(u, small_grid), s, small_grid)
    if s >= 0:
        assert ns >= nrm - 1e-12
    else:
        assert ns <= nrm + 1e-12
