import pytest

from xsblab.lemmas import check_el1, check_el2, check_el3, check_el4, lemma_scan


class TestEl1:
    def test_coincident_centers_closed_form(self):
        # integral of <x>^{-3} over R is exactly 1, and <a1-a2> = 1
        assert check_el1(0.0, 0.0, 0.75) == pytest.approx(1.0, rel=1e-9)

    def test_uniform_in_separation(self):
        r10 = check_el1(0.0, 10.0, 0.75)
        r50 = check_el1(0.0, 50.0, 0.75)
        r100 = check_el1(0.0, 100.0, 0.75)
        assert 0.5 <= r100 / r10 <= 2.0
        assert 0.5 <= r50 / r10 <= 2.0

    def test_translation_invariance(self):
        assert check_el1(5.0, 15.0, 0.8) == pytest.approx(check_el1(-5.0, 5.0, 0.8), rel=1e-8)

    def test_precondition(self):
        with pytest.raises(ValueError):
            check_el1(0.0, 1.0, 0.5)


class TestEl2:
    def test_baseline_finite(self):
        v = check_el2(0.0, 1.0, 0.6, 0.6)
        assert 0 < v < 100

    def test_exact_homogeneity(self):
        # |x|-kernels scale exactly: the normalized value is lambda-free
        base = check_el2(0.0, 1.0, 0.6, 0.6)
        for lam in (2.0, 10.0):
            assert check_el2(0.0, lam, 0.6, 0.6) == pytest.approx(base, rel=5e-3)

    def test_preconditions(self):
        with pytest.raises(ValueError):
            check_el2(0.0, 1.0, 0.5, 0.5)  # c1 + c2 <= 1
        with pytest.raises(ValueError):
            check_el2(0.0, 1.0, 1.2, 0.6)  # c1 >= 1
        with pytest.raises(ValueError):
            check_el2(1.0, 1.0, 0.6, 0.6)  # a1 == a2


class TestEl3:
    def test_unit_exponents_sup_one(self):
        rep = check_el3(1.0, 1.0, 1.0)
        assert rep.sup == pytest.approx(1.0, abs=0.01)

    def test_c1_zero_sup_at_origin(self):
        rep = check_el3(3.0, 0.0, 0.7)
        assert rep.sup == pytest.approx(1.0, rel=1e-9)

    def test_scale_free_normalized_sup(self):
        sups = [check_el3(a, 0.5, 1.0).sup for a in (1.0, 10.0, 100.0)]
        assert max(sups) / min(sups) < 1.01

    def test_refinement_stable(self):
        rep = check_el3(2.0, 0.5, 0.9)
        assert rep.refined_change < 0.01

    def test_precondition(self):
        with pytest.raises(ValueError):
            check_el3(1.0, 1.1, 1.0)


class TestEl4:
    def test_baseline(self):
        v1 = check_el4(1.0, 1.0, 0.75)
        assert 0 < v1 < 50

    def test_uniform_in_eta(self):
        v1 = check_el4(1.0, 1.0, 0.75)
        for eta in (10.0, 100.0):
            assert v1 / 4.0 <= check_el4(1.0, eta, 0.75) <= 4.0 * v1

    def test_uniform_in_a(self):
        v1 = check_el4(1.0, 5.0, 0.75)
        for a in (10.0, 100.0):
            assert v1 / 4.0 <= check_el4(a, 5.0, 0.75) <= 4.0 * v1

    def test_boundary_rejected(self):
        with pytest.raises(ValueError):
            check_el4(1.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            check_el4(0.0, 1.0, 0.75)


class TestScan:
    def test_spreads_bounded(self):
        scan = lemma_scan()
        for name, rec in scan.items():
            assert rec["spread"] <= 8.0, name
