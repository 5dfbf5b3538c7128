"""Scaling counterexample: indicator data on a thin slab along the dispersion curve.

The slab at frequency N is

    B = { (xi, tau) : N <= xi <= N + N^(-1/2), |tau - phi(xi)| <= 1 },

with |B| = 2 N^(-1/2) exactly.  For v with v_hat = chi_B the X^{s,b} norm
scales like N^(s - 1/4); the triple convolution chi_B * chi_B * chi_(-B)
(the transform of v * v * conj(v)) is of order 1/N on a sub-slab of
comparable measure, so the norm ratio of the cubic term to the cube of the
data norm scales like N^(-2s - 1/2): bounded for s > -1/4, blowing up for
s < -1/4.  This module measures those exponents.

Everything here works in continuum quadrature over (xi, mu) with
mu = tau - phi(xi): the slab lives at frequencies far beyond any sensible
space-time DFT box, and in these coordinates the slab is a rectangle, so
tensor quadrature is exact-geometry.  The convolution is evaluated either
by stratified Monte Carlo over B x B with a membership test (default) or
by a deterministic grid rule that integrates the tau-directions in closed
form (regression mode).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import _kernels
from .errors import NonPositiveValueError
from .params import PhaseParams
from .spectral import bracket, phase_symbol
from .xsb import XsbIndex

DEFAULT_N_LADDER = (64, 128, 256, 512, 1024)


@dataclass(frozen=True)
class BumpSet:
    """Quadrature discretization of the slab B at scale N."""

    N: float
    params: PhaseParams
    xi: np.ndarray  # (n_xi,) midpoints in [N, N + delta]
    mu: np.ndarray  # (n_mu,) midpoints in [-1, 1]
    weight: float  # common cell measure d(xi) * d(mu)
    measure: float

    @property
    def delta(self) -> float:
        return self.N ** (-0.5)

    @property
    def tau(self) -> np.ndarray:
        """Absolute tau samples, shape (n_xi, n_mu)."""
        return phase_symbol(self.xi, self.params)[:, None] + self.mu[None, :]

    def samples(self):
        """(xi, tau, weight) triples as flat arrays."""
        xi = np.repeat(self.xi, self.mu.size)
        tau = self.tau.ravel()
        w = np.full(xi.size, self.weight)
        return xi, tau, w


def build_bump(N: float, resolution=(128, 128), params: PhaseParams | None = None) -> BumpSet:
    """Midpoint tensor cloud on B; measure is exact (2 N^(-1/2)) by construction."""
    if N < 4:
        raise ValueError(f"N={N} must be >= 4")
    n_xi, n_mu = resolution
    if n_xi < 64 or n_mu < 64:
        raise ValueError("resolution must be at least 64 x 64")
    params = params or PhaseParams(alpha=0.0, beta=1.0)
    delta = N ** (-0.5)
    xi = N + (np.arange(n_xi) + 0.5) * (delta / n_xi)
    mu = -1.0 + (np.arange(n_mu) + 0.5) * (2.0 / n_mu)
    weight = (delta / n_xi) * (2.0 / n_mu)
    return BumpSet(N=float(N), params=params, xi=xi, mu=mu, weight=weight, measure=2.0 * delta)


def bump_xsb_norm(bump: BumpSet, idx: XsbIndex) -> float:
    """X^{s,b} norm of chi_B by weighted quadrature over the slab."""
    wx = bracket(bump.xi) ** (2.0 * idx.s)
    wm = bracket(bump.mu) ** (2.0 * idx.b)
    return math.sqrt(float(np.sum(wx[:, None] * wm[None, :]) * bump.weight))


# -- targets and the triple convolution ---------------------------------------


@dataclass(frozen=True)
class TargetLattice:
    """Midpoint lattice of (xi, tau) evaluation points near the slab."""

    xi: np.ndarray  # (n,) flat
    tau: np.ndarray  # (n,) flat
    mu: np.ndarray  # (n,) tau - phi(xi)
    weight: float
    shape: tuple


def default_targets(N: float, params: PhaseParams, n_xi: int = 40, n_mu: int = 33, mu_pad: float = 4.0) -> TargetLattice:
    """Cover xi in [N - 2 delta, N + 3 delta], tau within +-mu_pad of the curve."""
    delta = N ** (-0.5)
    xi_lo, xi_hi = N - 2.0 * delta, N + 3.0 * delta
    xi = xi_lo + (np.arange(n_xi) + 0.5) * ((xi_hi - xi_lo) / n_xi)
    mu = -mu_pad + (np.arange(n_mu) + 0.5) * (2.0 * mu_pad / n_mu)
    XI, MU = np.meshgrid(xi, mu, indexing="ij")
    tau = phase_symbol(XI, params) + MU
    weight = ((xi_hi - xi_lo) / n_xi) * (2.0 * mu_pad / n_mu)
    return TargetLattice(
        xi=XI.ravel(), tau=tau.ravel(), mu=MU.ravel(), weight=weight, shape=(n_xi, n_mu)
    )


@dataclass
class ConvolutionField:
    """chi_B * chi_B * chi_(-B) evaluated on a target lattice."""

    targets: TargetLattice
    values: np.ndarray
    sigma: np.ndarray | None  # per-target MC standard error (None for grid mode)
    flagged: bool  # relative MC error above 5% where the field is large
    mode: str

    def total_mass(self) -> float:
        return float(np.sum(self.values) * self.targets.weight)


def _stratified_uniform(rng: np.random.Generator, n: int) -> np.ndarray:
    """Latin-style stratified uniforms on [0, 1): one point per stratum, shuffled."""
    return rng.permutation((np.arange(n) + rng.random(n)) / n)


def triple_convolution(
    bump: BumpSet,
    targets: TargetLattice,
    mode: str = "mc",
    n_samples: int = 1 << 16,
    seed: int = 0,
    grid_resolution: tuple = (96, 96),
) -> ConvolutionField:
    """Evaluate the triple convolution on the target lattice.

    mc:   stratified Monte Carlo over B x B, membership test x + y - zeta in B,
          one shared sample cloud across targets (errors are then positively
          correlated across neighboring targets, which regression of slopes
          tolerates well).
    grid: deterministic tensor rule in (xi_1, xi_2) with the exact inner
          interval for the xi constraint and the closed-form area of the
          mu-band for the tau constraint.
    """
    N, delta = bump.N, bump.delta
    al, be = bump.params.alpha, bump.params.beta
    area2 = bump.measure**2
    if mode == "mc":
        rng = np.random.default_rng(seed)
        xi1 = N + delta * _stratified_uniform(rng, n_samples)
        mu1 = -1.0 + 2.0 * _stratified_uniform(rng, n_samples)
        xi2 = N + delta * _stratified_uniform(rng, n_samples)
        mu2 = -1.0 + 2.0 * _stratified_uniform(rng, n_samples)
        counts = _kernels.conv_counts(xi1, mu1, xi2, mu2, targets.xi, targets.tau, N, delta, al, be)
        p = counts / float(n_samples)
        values = p * area2
        sigma = np.sqrt(np.maximum(p * (1.0 - p), 0.0) / n_samples) * area2
        peak = float(values.max(initial=0.0))
        big = values > 0.5 * peak
        flagged = bool(peak > 0.0 and np.any(sigma[big] > 0.05 * values[big]))
        return ConvolutionField(targets=targets, values=values, sigma=sigma, flagged=flagged, mode="mc")
    if mode == "grid":
        n1, n2 = grid_resolution
        u1 = N + delta * (np.arange(n1) + 0.5) / n1
        w1 = delta / n1
        values = np.empty(targets.xi.size)
        phi1 = al * u1**2 + be * u1**3
        for j in range(targets.xi.size):
            xz, tz = targets.xi[j], targets.tau[j]
            lo = np.maximum(N, N + xz - u1)
            hi = np.minimum(N + delta, N + delta + xz - u1)
            width = hi - lo
            ok = width > 0
            if not np.any(ok):
                values[j] = 0.0
                continue
            lo_, hi_, phi1_ = lo[ok], hi[ok], phi1[ok]
            u1_ = u1[ok]
            t = (np.arange(n2) + 0.5) / n2
            u2 = lo_[:, None] + (hi_ - lo_)[:, None] * t[None, :]
            xs = u1_[:, None] + u2 - xz
            q = tz + (al * xs**2 + be * xs**3) - phi1_[:, None] - (al * u2**2 + be * u2**3)
            band = _sum_band_area(q)
            inner = np.sum(band, axis=1) * ((hi_ - lo_) / n2)
            values[j] = float(np.sum(inner) * w1)
        return ConvolutionField(targets=targets, values=values, sigma=None, flagged=False, mode="grid")
    raise ValueError(f"unknown convolution mode {mode!r}")


def _sum_band_area(q):
    """Area of {(m1, m2) in [-1,1]^2 : |m1 + m2 - q| <= 1} in closed form."""

    def cdf(c):
        c = np.clip(c, -2.0, 2.0)
        below = 0.5 * (c + 2.0) ** 2
        above = 4.0 - 0.5 * (2.0 - c) ** 2
        return np.where(c <= 0.0, below, above)

    return cdf(q + 1.0) - cdf(q - 1.0)


# -- ratios and scaling fits ---------------------------------------------------


@dataclass
class RatioResult:
    N: float
    num: float
    den: float
    ratio: float
    flagged: bool
    mode: str


def counterexample_ratio(
    N: float,
    s: float,
    b: float,
    resolution=(128, 128),
    mode: str = "mc",
    n_samples: int = 1 << 16,
    seed: int = 0,
    params: PhaseParams | None = None,
    conv: ConvolutionField | None = None,
) -> RatioResult:
    """num = X^{s,b-1} norm of the triple convolution, den = (X^{s,b} norm of chi_B)^3.

    The convolution itself is independent of (s, b); pass `conv` to reuse one
    evaluation across several norm indices.
    """
    params = params or PhaseParams(alpha=0.0, beta=1.0)
    bump = build_bump(N, resolution=resolution, params=params)
    if conv is None:
        targets = default_targets(N, params)
        conv = triple_convolution(bump, targets, mode=mode, n_samples=n_samples, seed=seed)
    idx = XsbIndex(s=s, b=b)
    den = bump_xsb_norm(bump, idx) ** 3
    wx = bracket(conv.targets.xi) ** (2.0 * s)
    wm = bracket(conv.targets.mu) ** (2.0 * (b - 1.0))
    num = math.sqrt(float(np.sum(wx * wm * conv.values**2) * conv.targets.weight))
    return RatioResult(N=float(N), num=num, den=den, ratio=num / den, flagged=conv.flagged, mode=conv.mode)


@dataclass
class ScalingReport:
    """(N, value) series with its fitted log-log slope."""

    points: list  # [(N, value)]
    slope: float
    stderr: float

    def __post_init__(self):
        ns = [p[0] for p in self.points]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError("N values must be strictly increasing")


def fit_scaling_exponent(points) -> ScalingReport:
    """Ordinary least squares of log(value) on log(N)."""
    points = [(float(n), float(v)) for n, v in points]
    if len(points) < 4:
        raise ValueError("need at least 4 points")
    if any(v <= 0 for _, v in points):
        raise NonPositiveValueError("all values must be positive for a log-log fit")
    ln_n = np.log([n for n, _ in points])
    ln_v = np.log([v for _, v in points])
    res = stats.linregress(ln_n, ln_v)
    return ScalingReport(points=points, slope=float(res.slope), stderr=float(res.stderr))


def norm_scaling(s: float, b: float, n_ladder=DEFAULT_N_LADDER, resolution=(128, 128), params=None) -> ScalingReport:
    """Slope of the slab norm vs N (expected: s - 1/4)."""
    params = params or PhaseParams(alpha=0.0, beta=1.0)
    idx = XsbIndex(s=s, b=b)
    pts = [(N, bump_xsb_norm(build_bump(N, resolution, params), idx)) for N in n_ladder]
    return fit_scaling_exponent(pts)


def ratio_scaling(
    s: float,
    b: float,
    n_ladder=DEFAULT_N_LADDER,
    resolution=(128, 128),
    mode: str = "mc",
    n_samples: int = 1 << 16,
    seed: int = 0,
    params=None,
    conv_cache: dict | None = None,
):
    """Ratio series over the N ladder and its fitted slope (expected: -2s - 1/2).

    `conv_cache` maps N -> ConvolutionField so several (s, b) pairs can share
    the convolution evaluations.
    """
    params = params or PhaseParams(alpha=0.0, beta=1.0)
    results = []
    for k, N in enumerate(n_ladder):
        conv = conv_cache.get(N) if conv_cache is not None else None
        if conv is None:
            bump = build_bump(N, resolution=resolution, params=params)
            targets = default_targets(N, params)
            conv = triple_convolution(bump, targets, mode=mode, n_samples=n_samples, seed=seed + k)
            if conv_cache is not None:
                conv_cache[N] = conv
        results.append(
            counterexample_ratio(N, s, b, resolution=resolution, params=params, conv=conv)
        )
    report = fit_scaling_exponent([(r.N, r.ratio) for r in results])
    return results, report
