import numpy as np
import pytest

from xsblab.errors import QuadratureError
from xsblab.params import PhaseParams
from xsblab.resonance import (
    QuadSpec,
    ResonanceIntegrand,
    _direct_family,
    _integrate_rect,
    _rescaled_family,
    dichotomy_I00,
    eval_I,
    eval_I_report,
    proposition_checks,
    uniform_bound_scan,
)

STD = PhaseParams(alpha=0.0, beta=1.0)


class TestReferenceFormulas:
    def test_resonance_matches_cube_differences(self):
        rng = np.random.default_rng(0)
        R = ResonanceIntegrand(0.2, 0.7, STD)
        for _ in range(50):
            xi, x1, x2 = rng.uniform(-5, 5, 3)
            direct = (xi**3) - (xi - x1 + x2) ** 3 - (-x2) ** 3 + (-x1) ** 3
            assert R.resonance(xi, x1, x2) == pytest.approx(direct, rel=1e-9, abs=1e-9)
            assert R.g(xi, x1, x2) == pytest.approx(direct, rel=1e-9, abs=1e-9)

    def test_resonance_general_coefficients(self):
        rng = np.random.default_rng(1)
        p = PhaseParams(alpha=0.7, beta=-1.3)
        R = ResonanceIntegrand(0.1, 0.7, p)

        def phi(x):
            return p.alpha * x**2 + p.beta * x**3

        for _ in range(50):
            xi, x1, x2 = rng.uniform(-4, 4, 3)
            direct = phi(xi) - phi(xi - x1 + x2) - phi(-x2) + phi(-x1)
            assert R.resonance(xi, x1, x2) == pytest.approx(direct, rel=1e-9, abs=1e-8)

    def test_integrand_symmetry(self):
        # swapping (x1, x2) -> (-x2, -x1) leaves the direct integrand unchanged
        rng = np.random.default_rng(2)
        R = ResonanceIntegrand(0.15, 0.8, STD)
        x1 = rng.uniform(-10, 10, 100)
        x2 = rng.uniform(-10, 10, 100)
        a = R.direct_integrand(1.7, 3.0, x1, x2)
        b = R.direct_integrand(1.7, 3.0, -x2, -x1)
        assert np.allclose(a, b, rtol=1e-12)

    def test_c_rho(self):
        assert ResonanceIntegrand(0.25, 0.8, STD).c_rho == pytest.approx(1.0)


class TestFamilyAssembly:
    def test_direct_den_matches_reference(self):
        rng = np.random.default_rng(3)
        for p in (STD, PhaseParams(alpha=0.9, beta=2.0)):
            xi, y = 1.3, -4.0
            R = ResonanceIntegrand(0.2, 0.7, p)
            fam = _direct_family(xi, y, 0.2, 0.7, p)
            for _ in range(30):
                x1, x2 = rng.uniform(-6, 6, 2)
                A = fam.denA[0] + fam.denA[1] * x1 + fam.denA[2] * x1**2
                B = fam.denB[0] + fam.denB[1] * x1 + fam.denB[2] * x1**2
                C = fam.denC[0] + fam.denC[1] * x1 + fam.denC[2] * x1**2
                want = y + R.resonance(xi, x1, x2)
                assert A * x2**2 + B * x2 + C == pytest.approx(want, rel=1e-10, abs=1e-9)

    def test_rescaled_den_matches_reference(self):
        rng = np.random.default_rng(4)
        xi, z = 2.0, 1.5
        R = ResonanceIntegrand(0.2, 0.7, STD)
        fam = _rescaled_family(xi, z, 0.2, 0.7)
        for _ in range(30):
            x1, x2 = rng.uniform(-6, 6, 2)
            A = fam.denA[0] + fam.denA[1] * x1 + fam.denA[2] * x1**2
            B = fam.denB[0] + fam.denB[1] * x1 + fam.denB[2] * x1**2
            C = fam.denC[0] + fam.denC[1] * x1 + fam.denC[2] * x1**2
            want = xi**3 * (z + 3.0 * R.F(x1, x2))
            assert A * x2**2 + B * x2 + C == pytest.approx(want, rel=1e-10, abs=1e-9)

    def test_rectangle_against_brute_force(self):
        # small box, dense tensor rule on the reference integrand
        xi, y, rho, b = 0.7, 2.0, 0.2, 0.7
        fam = _direct_family(xi, y, rho, b, STD)
        got = _integrate_rect(fam, -3.0, 3.0, -3.0, 3.0, 8) * fam.prefactor
        R = ResonanceIntegrand(rho, b, STD)
        n = 3000
        x1 = np.linspace(-3, 3, n)
        x2 = np.linspace(-3, 3, n)
        X1, X2 = np.meshgrid(x1, x2, indexing="ij")
        vals = R.direct_integrand(xi, y, X1, X2)
        brute = vals.sum() * (6.0 / n) ** 2 * fam.prefactor
        assert got == pytest.approx(brute, rel=2e-3)


class TestEvalI:
    def test_finite_above_threshold(self):
        v = eval_I(0.0, 0.0, 0.2, 0.7)
        assert np.isfinite(v) and v > 0

    def test_monotone_partials(self):
        rep = eval_I_report(0.5, 1.0, 0.1, 0.8)
        assert all(b >= a - 1e-12 for a, b in zip(rep.partials, rep.partials[1:]))

    def test_forms_agree(self):
        q = QuadSpec()
        for xi, y in ((2.0, 8.0), (4.0, 64.0), (10.0, 500.0)):
            d = eval_I_report(xi, y, 0.05, 0.85, quad=q, form="direct")
            r = eval_I_report(xi, y, 0.05, 0.85, quad=q, form="rescaled")
            assert d.value_extrapolated == pytest.approx(r.value_extrapolated, rel=0.02)

    def test_divergent_raises(self):
        with pytest.raises(QuadratureError) as exc:
            eval_I(0.0, 0.0, 0.2, 0.5, quad=QuadSpec(truncation_radius=512.0))
        assert exc.value.partial is not None and exc.value.partial > 0

    def test_rho_precondition(self):
        with pytest.raises(ValueError):
            eval_I(0.0, 0.0, 0.3, 0.9)


class TestDichotomy:
    @pytest.mark.parametrize(
        "rho,b,regime",
        [
            (0.2, 0.7, "convergent"),
            (0.2, 0.5, "divergent"),
            (0.0, 1.0 / 3.0, "divergent"),  # threshold included on the divergent side
            (0.05, 0.75, "convergent"),
        ],
    )
    def test_regimes(self, rho, b, regime):
        assert dichotomy_I00(rho, b).regime == regime

    def test_slope_fields_populated(self):
        v = dichotomy_I00(0.1, 0.8)
        assert len(v.radii) == len(v.partial_integrals)
        assert v.increment_slope < -0.02


class TestUniformBound:
    def test_scan_finite_and_stable(self):
        quad = QuadSpec(truncation_radius=256.0)
        rep = uniform_bound_scan(0.2, 0.7, xi_grid=[0.0, 0.5, 2.0, 32.0], z_grid=[0.0, 1.0], quad=quad)
        assert rep.failures == 0
        assert np.isfinite(rep.sup)
        rep2 = uniform_bound_scan(
            0.2, 0.7, xi_grid=[0.0, 0.5, 2.0, 32.0], z_grid=[0.0, 1.0], quad=quad.scaled(radius_factor=2.0)
        )
        assert abs(rep2.sup - rep.sup) / rep.sup < 0.10

    def test_y_zero_slice_bounded_in_xi(self):
        quad = QuadSpec(truncation_radius=256.0)
        vals = []
        for xi in (2.0, 8.0, 64.0):
            vals.append(eval_I(xi, 0.0, 0.2, 0.7, quad=quad))
        assert max(vals) / min(vals) < 10.0

    def test_negative_control_grows(self):
        small = uniform_bound_scan(0.2, 0.5, xi_grid=[0.0], z_grid=[0.0], quad=QuadSpec(truncation_radius=64.0))
        large = uniform_bound_scan(0.2, 0.5, xi_grid=[0.0], z_grid=[0.0], quad=QuadSpec(truncation_radius=1024.0))
        assert large.sup > 1.2 * small.sup


class TestPropositions:
    def test_j2_bounded_in_xi(self):
        rep = proposition_checks(0.2, 0.7, xi_list=[2.0, 10.0, 100.0], z_list=[1.0])
        vals = [p.value for p in rep.j2.points]
        assert max(vals) / min(vals) < 4.0

    def test_j1_requires_large_xi(self):
        rep = proposition_checks(0.2, 0.7, xi_list=[0.5, 2.0], z_list=[1.0])
        assert len(rep.j1.points) == 1  # only |xi| > 1 evaluated
        assert len(rep.j2.points) == 2

    def test_j2_unbounded_below_threshold(self):
        # below b = 1/3 + 2 rho/3 the xi-uniformity is what breaks: the
        # prefactor xi^{2+4rho} outruns the integral's xi-decay (the
        # R-integral itself still converges for b > 1/3)
        rho, b = 0.2, 0.40  # threshold at 0.4667
        rep = proposition_checks(rho, b, xi_list=[10.0, 100.0, 1000.0], z_list=[1.0])
        vals = [p.value for p in rep.j2.points]
        assert vals[-1] > 2.0 * vals[0]
        good = proposition_checks(rho, 0.7, xi_list=[10.0, 100.0, 1000.0], z_list=[1.0])
        gvals = [p.value for p in good.j2.points]
        assert max(gvals) / min(gvals) < 4.0
