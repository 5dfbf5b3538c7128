"""Backend agreement: the compiled kernels must reproduce the NumPy fallback."""

import numpy as np
import pytest

from xsblab._kernels import _pybackend

try:
    from xsblab._kernels import _cykernels
except ImportError:
    _cykernels = None

needs_ext = pytest.mark.skipif(_cykernels is None, reason="compiled extension not built")


def _workload(seed, n=200, lo=-50.0, hi=80.0):
    rng = np.random.default_rng(seed)
    A = rng.uniform(-20, 20, n)
    B = rng.uniform(-100, 100, n)
    C = rng.uniform(-1000, 1000, n)
    A[::7] = 0.0  # linear denominators
    A[::11] = 1e-18  # nearly degenerate
    off = rng.uniform(-30, 30, (3, n))
    slope = np.array([1.0, 0.0, -2.0])
    power = np.array([0.3, 0.44, 0.0])
    kind = np.array([0, 0, 1], dtype=np.int8)
    glx, glw = np.polynomial.legendre.leggauss(8)
    return (A, B, C, lo, hi, off, slope, power, kind, 1.5, glx, glw)


class TestBuildPoints:
    def test_sorted_within_bounds(self):
        pts = _pybackend.build_points(-3.0, 7.0, [0.5, 20.0], [1e-6, 0.1], [2.0], [0.5])
        assert pts[0] == -3.0 and pts[-1] == 7.0
        assert np.all(np.diff(pts) > 0)

    def test_peak_resolved(self):
        pts = _pybackend.build_points(-10.0, 10.0, [1.0], [1e-8], [], [])
        gaps = np.diff(pts)
        j = np.searchsorted(pts, 1.0)
        assert gaps.min() <= 2e-8
        assert abs(pts[j] - 1.0) < 1e-7 or abs(pts[j - 1] - 1.0) < 1e-7

    def test_degenerate_interval(self):
        pts = _pybackend.build_points(0.0, 1.0, [], [], [], [])
        assert len(pts) == 2


class TestAgreement:
    @needs_ext
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_inner_sweep_matches(self, seed):
        args = _workload(seed)
        v_py = _pybackend.inner_sweep(*args)
        v_cy = _cykernels.inner_sweep(*args)
        assert np.max(np.abs(v_py - v_cy) / np.maximum(np.abs(v_py), 1e-300)) < 1e-9

    @needs_ext
    def test_no_terms(self):
        A, B, C, lo, hi, _, _, _, _, b2, glx, glw = _workload(3)
        off = np.empty((0, A.size))
        slope = np.empty(0)
        power = np.empty(0)
        kind = np.empty(0, dtype=np.int8)
        v_py = _pybackend.inner_sweep(A, B, C, lo, hi, off, slope, power, kind, b2, glx, glw)
        v_cy = _cykernels.inner_sweep(A, B, C, lo, hi, off, slope, power, kind, b2, glx, glw)
        assert np.allclose(v_py, v_cy, rtol=1e-9)

    @needs_ext
    def test_conv_counts_match_exactly(self):
        rng = np.random.default_rng(7)
        n = 1 << 12
        N, delta = 64.0, 64.0**-0.5
        xi1 = N + delta * rng.random(n)
        mu1 = -1 + 2 * rng.random(n)
        xi2 = N + delta * rng.random(n)
        mu2 = -1 + 2 * rng.random(n)
        xt = N + delta * rng.random(50)
        tt = xt**3 + rng.uniform(-3, 3, 50)
        a_py = _pybackend.conv_counts(xi1, mu1, xi2, mu2, xt, tt, N, delta, 0.0, 1.0)
        a_cy = _cykernels.conv_counts(xi1, mu1, xi2, mu2, xt, tt, N, delta, 0.0, 1.0)
        assert np.array_equal(a_py, a_cy)


class TestInnerSweepOracle:
    def test_against_dense_quadrature(self):
        # constant-coefficient case with a closed-form-free but brute-force
        # checkable integral: one node, simple bracket integrand
        A = np.array([2.0])
        B = np.array([0.0])
        C = np.array([-8.0])  # roots at +-2
        off = np.array([[0.5]])
        slope = np.array([1.0])
        power = np.array([0.4])
        kind = np.array([0], dtype=np.int8)
        glx, glw = np.polynomial.legendre.leggauss(8)
        got = _pybackend.inner_sweep(A, B, C, -30.0, 30.0, off, slope, power, kind, 1.6, glx, glw)[0]
        x = np.linspace(-30, 30, 4_000_001)
        f = (1 + np.abs(0.5 + x)) ** 0.4 * (1 + np.abs(2 * x**2 - 8)) ** -1.6
        want = np.trapezoid(f, x)
        assert got == pytest.approx(want, rel=5e-5)
