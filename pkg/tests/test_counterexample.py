import numpy as np
import pytest

from xsblab.counterexample import (
    build_bump,
    bump_xsb_norm,
    counterexample_ratio,
    default_targets,
    fit_scaling_exponent,
    norm_scaling,
    ratio_scaling,
    triple_convolution,
)
from xsblab.errors import NonPositiveValueError
from xsblab.params import PhaseParams
from xsblab.spectral import phase_symbol
from xsblab.xsb import XsbIndex

PARAMS = PhaseParams(alpha=0.0, beta=1.0)


class TestBuildBump:
    def test_measure_exact(self):
        bump = build_bump(16, (128, 128))
        assert bump.measure == pytest.approx(2.0 * 16**-0.5, rel=1e-3)

    def test_refinement_stability(self):
        a = build_bump(64, (128, 128)).measure
        b = build_bump(64, (256, 256)).measure
        assert abs(b - a) / a < 5e-4

    def test_samples_satisfy_constraints(self):
        bump = build_bump(64, (64, 64))
        xi, tau, w = bump.samples()
        assert np.all(xi >= bump.N) and np.all(xi <= bump.N + bump.delta)
        assert np.all(np.abs(tau - phase_symbol(xi, bump.params)) <= 1.0)
        assert np.sum(w) == pytest.approx(bump.measure, rel=1e-12)

    def test_preconditions(self):
        with pytest.raises(ValueError):
            build_bump(2)
        with pytest.raises(ValueError):
            build_bump(64, (32, 128))

    def test_deterministic(self):
        a = build_bump(128, (64, 64))
        b = build_bump(128, (64, 64))
        assert np.array_equal(a.xi, b.xi) and np.array_equal(a.mu, b.mu)


class TestBumpNorm:
    def test_unit_weights(self):
        bump = build_bump(64, (128, 128))
        assert bump_xsb_norm(bump, XsbIndex(0.0, 0.0)) == pytest.approx(bump.measure**0.5, rel=1e-12)

    def test_tau_refinement(self):
        idx = XsbIndex(-0.5, 0.75)
        a = bump_xsb_norm(build_bump(64, (128, 128)), idx)
        b = bump_xsb_norm(build_bump(64, (128, 256)), idx)
        assert abs(b - a) / a < 5e-3

    def test_slope_saturates_upper_bound(self):
        rep = norm_scaling(-0.5, 0.75, n_ladder=(64, 128, 256, 512))
        assert rep.slope == pytest.approx(-0.75, abs=0.05)


class TestTripleConvolution:
    def test_far_target_zero(self):
        bump = build_bump(64, (64, 64))
        t = default_targets(64, PARAMS)
        # shift targets far outside the arithmetic support
        t2 = type(t)(xi=t.xi + 10.0, tau=t.tau, mu=t.mu, weight=t.weight, shape=t.shape)
        conv = triple_convolution(bump, t2, mode="grid")
        assert np.all(conv.values == 0.0)

    def test_mass_identity(self):
        bump = build_bump(64, (128, 128))
        wide = default_targets(64, PARAMS, n_xi=60, n_mu=81, mu_pad=10.0)
        conv = triple_convolution(bump, wide, mode="grid")
        assert conv.total_mass() == pytest.approx(bump.measure**3, rel=0.01)

    def test_nonnegative(self):
        bump = build_bump(64, (64, 64))
        conv = triple_convolution(bump, default_targets(64, PARAMS), mode="mc", n_samples=1 << 14, seed=1)
        assert np.all(conv.values >= 0.0)

    def test_center_value_bracket_across_N(self):
        # conv * N at the best target stays in a fixed bracket over the ladder
        vals = []
        for N in (64, 128, 256, 512):
            bump = build_bump(N, (96, 96))
            conv = triple_convolution(bump, default_targets(N, PARAMS), mode="grid")
            vals.append(conv.values.max() * N)
        assert max(vals) / min(vals) < 1.5
        assert all(0.5 < v < 10.0 for v in vals)

    def test_mc_matches_grid(self):
        bump = build_bump(64, (96, 96))
        targets = default_targets(64, PARAMS)
        g = triple_convolution(bump, targets, mode="grid")
        m = triple_convolution(bump, targets, mode="mc", n_samples=1 << 16, seed=3)
        peak = g.values.max()
        assert np.max(np.abs(g.values - m.values)) / peak < 0.03

    def test_mc_flag_on_undersampling(self):
        bump = build_bump(64, (96, 96))
        conv = triple_convolution(bump, default_targets(64, PARAMS), mode="mc", n_samples=64, seed=0)
        assert conv.flagged

    def test_resolution_stability(self):
        bump = build_bump(128, (96, 96))
        targets = default_targets(128, PARAMS)
        a = triple_convolution(bump, targets, mode="grid", grid_resolution=(96, 96))
        b = triple_convolution(bump, targets, mode="grid", grid_resolution=(192, 192))
        peak = b.values.max()
        assert np.max(np.abs(a.values - b.values)) / peak < 0.01


class TestFitScaling:
    def test_exact_square_law(self):
        pts = [(n, float(n) ** 2) for n in (8, 16, 32, 64, 128)]
        rep = fit_scaling_exponent(pts)
        assert rep.slope == pytest.approx(2.0, abs=1e-12)
        assert rep.stderr < 1e-12

    def test_constant_series(self):
        rep = fit_scaling_exponent([(n, 3.7) for n in (8, 16, 32, 64)])
        assert rep.slope == pytest.approx(0.0, abs=1e-13)

    def test_noisy_power_law(self):
        rng = np.random.default_rng(0)
        pts = [(n, n**1.5 * (1 + 0.01 * rng.standard_normal())) for n in (8, 16, 32, 64, 128, 256)]
        rep = fit_scaling_exponent(pts)
        assert rep.slope == pytest.approx(1.5, abs=0.02)

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            fit_scaling_exponent([(8, 1.0), (16, 2.0), (32, 3.0)])
        with pytest.raises(NonPositiveValueError):
            fit_scaling_exponent([(8, 1.0), (16, -2.0), (32, 3.0), (64, 4.0)])
        with pytest.raises(ValueError):
            fit_scaling_exponent([(8, 1.0), (8, 2.0), (32, 3.0), (64, 4.0)])


class TestRatioScaling:
    def test_threshold_slopes(self):
        cache = {}
        slopes = {}
        for s in (-0.5, 0.0):
            _, rep = ratio_scaling(
                s, 0.75, n_ladder=(64, 128, 256, 512), mode="grid", conv_cache=cache
            )
            slopes[s] = rep.slope
        assert slopes[-0.5] == pytest.approx(0.5, abs=0.1)
        assert slopes[0.0] == pytest.approx(-0.5, abs=0.1)

    def test_ratio_deterministic_for_seed(self):
        a = counterexample_ratio(64, -0.5, 0.75, mode="mc", n_samples=1 << 14, seed=9)
        b = counterexample_ratio(64, -0.5, 0.75, mode="mc", n_samples=1 << 14, seed=9)
        assert a.ratio == b.ratio

    def test_alpha_nonzero_accepted(self):
        p = PhaseParams(alpha=1.0, beta=1.0)
        r = counterexample_ratio(16, -0.5, 0.75, mode="grid", params=p)
        assert r.ratio > 0
