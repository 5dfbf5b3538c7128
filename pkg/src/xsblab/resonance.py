"""Resonance-integral quadrature: the two-dimensional bracket integrals.

Everything here evaluates integrals of the shape

    integral over R^2 of  W(x1, x2) / <D(x1, x2)>^(2b)  dx1 dx2,

where W is a product of bracket/absolute-value powers of affine forms and
D is quadratic in x2 with polynomial-in-x1 coefficients.  That family
covers the resonance integral I(xi, y) in both its direct and rescaled
coordinates, its value at the origin (whose finiteness dichotomy in
(rho, b) is the sharp-threshold statement this module verifies), and the
two auxiliary bounds J1, J2.

The domain is exhausted by nested squares [-R, R]^2 with geometrically
growing R; annulus increments are integrated directly (never by
differencing), so they are nonnegative and their decay/growth rate is the
convergence diagnostic: increments decaying -> converged value, partial
integrals growing at a stable log-log slope -> certified divergence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import QuadratureError
from .params import PhaseParams
from .spectral import bracket

__all__ = [
    "QuadSpec",
    "ResonanceIntegrand",
    "DichotomyVerdict",
    "PointResult",
    "BoundReport",
    "eval_I",
    "eval_I_report",
    "dichotomy_I00",
    "uniform_bound_scan",
    "proposition_checks",
]

DICHOTOMY_SLOPE_TOL = 0.02


@dataclass(frozen=True)
class QuadSpec:
    """Truncation and resolution controls for the shell quadrature."""

    truncation_radius: float = 2048.0
    points_per_decade: int = 26
    tolerance: float = 5e-3
    max_refinements: int = 12

    def __post_init__(self):
        if self.truncation_radius < 10.0:
            raise ValueError("truncation_radius must be >= 10")
        if self.points_per_decade < 7:
            raise ValueError("points_per_decade must be >= 7")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_refinements < 4:
            raise ValueError("max_refinements must be >= 4")

    @property
    def n_gl(self) -> int:
        """Gauss-Legendre nodes per mesh segment (segments double per level)."""
        return max(4, round(self.points_per_decade / math.log2(10.0)))

    def scaled(self, radius_factor=1.0, density_factor=1.0) -> "QuadSpec":
        return QuadSpec(
            truncation_radius=self.truncation_radius * radius_factor,
            points_per_decade=max(7, round(self.points_per_decade * density_factor)),
            tolerance=self.tolerance,
            max_refinements=self.max_refinements + (1 if radius_factor > 1 else 0),
        )


@lru_cache(maxsize=8)
def _gl(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


@dataclass(frozen=True)
class ResonanceIntegrand:
    """Reference formulas of the resonance machinery (test oracle side).

    The fast path assembles the same quantities as polynomial coefficients;
    these direct evaluations exist so the assembly can be cross-checked and
    the symmetry/positivity properties tested on raw meshes.
    """

    rho: float
    b: float
    params: PhaseParams = PhaseParams(alpha=0.0, beta=1.0)

    def G(self, xi, xi1, xi2):
        r2 = 2.0 * self.rho
        return bracket(xi + xi1 - xi2) ** r2 * bracket(xi1) ** r2 * bracket(xi2) ** r2

    def g(self, xi, xi1, xi2):
        """Cubic resonance polynomial (alpha = 0, beta = 1 reduction)."""
        return 3.0 * (xi1 - xi2) * (xi - xi1) * (xi + xi2)

    def resonance(self, xi, xi1, xi2):
        """phi(xi) - phi(xi - xi1 + xi2) - phi(-xi2) + phi(-xi1), factored."""
        a, be = self.params.alpha, self.params.beta
        return (xi1 - xi2) * (xi + xi2) * (3.0 * be * (xi - xi1) + 2.0 * a)

    def H(self, xi, xi1, xi2):
        r2 = 2.0 * self.rho
        return (
            bracket(xi * (1.0 - (xi1 + xi2))) ** r2
            * bracket(xi * (1.0 - xi1)) ** r2
            * bracket(xi * (1.0 - xi2)) ** r2
        )

    def F(self, xi1, xi2):
        return (2.0 - (xi1 + xi2)) * xi1 * xi2

    def p(self, xi, z):
        return xi**2 / (bracket(xi**3 * z) ** (2.0 * (1.0 - self.b)) * bracket(xi) ** (2.0 * self.rho))

    @property
    def c_rho(self) -> float:
        return (2.0 + 4.0 * self.rho) / 3.0

    def direct_integrand(self, xi, y, xi1, xi2):
        """G_rho(xi, -xi1, -xi2) / <y + resonance>^{2b} (no prefactor)."""
        num = self.G(xi, -np.asarray(xi1), -np.asarray(xi2))
        den = bracket(y + self.resonance(xi, xi1, xi2)) ** (2.0 * self.b)
        return num / den


# -- integrand families as polynomial data -----------------------------------


@dataclass(frozen=True)
class _Family:
    """One 2D bracket integral in kernel form (see _kernels docstring)."""

    denA: tuple
    denB: tuple
    denC: tuple
    terms: tuple  # (off0, off1, slope, power, kind)
    b2: float
    outer_peaks: tuple  # (position, C_magnitude, |dA/dx1|)
    outer_kinks: tuple  # (position, width)
    clip: tuple | None = None
    prefactor: float = 1.0
    R0: float = 8.0


def _direct_family(xi, y, rho, b, params: PhaseParams) -> _Family:
    al, be = params.alpha, params.beta
    r2 = 2.0 * rho
    denA = (-(3.0 * be * xi + 2.0 * al), 3.0 * be, 0.0)
    denB = (-(3.0 * be * xi**2 + 2.0 * al * xi), 6.0 * be * xi + 2.0 * al, -3.0 * be)
    denC = (y, 3.0 * be * xi**2 + 2.0 * al * xi, -3.0 * be * xi)
    terms = (
        (xi, -1.0, 1.0, r2, 0),
        (0.0, 1.0, 0.0, r2, 0),
        (0.0, 0.0, 1.0, r2, 0),
    )
    apos = xi + 2.0 * al / (3.0 * be)
    pref = 1.0 / (bracket(xi) ** r2 * bracket(y) ** (2.0 * (1.0 - b)))
    R0 = max(8.0, 2.0 * abs(xi), 2.0 * (1.0 + abs(y)) ** (1.0 / 3.0))
    return _Family(
        denA,
        denB,
        denC,
        terms,
        2.0 * b,
        outer_peaks=((apos, 1.0 + abs(y), 3.0 * abs(be)),),
        outer_kinks=((0.0, 1.0),),
        prefactor=pref,
        R0=R0,
    )


def _rescaled_family(xi, z, rho, b, exact_jacobian=True) -> _Family:
    """I in the rescaled variables; y = xi^3 z.

    `exact_jacobian=True` keeps the factor 3 the change of variables
    produces in front of F, which is what makes the direct and rescaled
    evaluations agree numerically.
    """
    c3 = 3.0 if exact_jacobian else 1.0
    xi3 = xi**3
    r2 = 2.0 * rho
    denA = (0.0, -c3 * xi3, 0.0)
    denB = (0.0, 2.0 * c3 * xi3, -c3 * xi3)
    denC = (xi3 * z, 0.0, 0.0)
    terms = (
        (xi, -xi, -xi, r2, 0),
        (xi, -xi, 0.0, r2, 0),
        (xi, 0.0, -xi, r2, 0),
    )
    pref = xi**2 / (bracket(xi3 * z) ** (2.0 * (1.0 - b)) * bracket(xi) ** r2)
    R0 = max(8.0, 2.0 * abs(z) ** (1.0 / 3.0))
    kw = 1.0 / max(abs(xi), 1e-3)
    return _Family(
        denA,
        denB,
        denC,
        terms,
        2.0 * b,
        outer_peaks=((0.0, 1.0 + abs(xi3 * z), c3 * abs(xi3)),),
        outer_kinks=((1.0, kw),),
        prefactor=pref,
        R0=R0,
    )


def _j2_family(xi, z, rho, b) -> _Family:
    xi3 = xi**3
    return _Family(
        (0.0, -xi3, 0.0),
        (0.0, 2.0 * xi3, -xi3),
        (xi3 * z, 0.0, 0.0),
        (),
        2.0 * b,
        outer_peaks=((0.0, 1.0 + abs(xi3 * z), abs(xi3)),),
        outer_kinks=(),
        prefactor=abs(xi) ** (2.0 + 4.0 * rho),
        R0=max(8.0, 2.0 * abs(z) ** (1.0 / 3.0)),
    )


def _j1_family(xi, z, rho, b) -> _Family:
    base = _j2_family(xi, z, rho, b)
    return _Family(
        base.denA,
        base.denB,
        base.denC,
        ((0.0, 1.0, 0.0, 4.0 * rho, 1),),
        base.b2,
        outer_peaks=base.outer_peaks,
        outer_kinks=((0.0, 1.0),),
        clip=(0.0, math.inf),
        prefactor=base.prefactor,
        R0=base.R0,
    )


# -- shell quadrature ---------------------------------------------------------


def _integrate_rect(fam: _Family, Lo, Hi, lo, hi, n_gl):
    if fam.clip is not None:
        Lo = max(Lo, fam.clip[0])
        Hi = min(Hi, fam.clip[1])
        if Hi <= Lo:
            return 0.0
    span = Hi - Lo
    R_in = max(abs(lo), abs(hi))
    ppos, pwid = [], []
    for pos, cmag, aslope in fam.outer_peaks:
        w = cmag / (aslope * R_in * R_in + cmag / (4.0 * span))
        ppos.append(pos)
        pwid.append(w)
    kp = [k for k, _ in fam.outer_kinks]
    kw = [w for _, w in fam.outer_kinks]
    pts = _kernels.build_points(Lo, Hi, ppos, pwid, kp, kw)
    glx, glw = _gl(n_gl)
    mid = 0.5 * (pts[1:] + pts[:-1])
    half = 0.5 * (pts[1:] - pts[:-1])
    x1 = (mid[:, None] + half[:, None] * glx[None, :]).ravel()
    w1 = (half[:, None] * glw[None, :]).ravel()
    A = fam.denA[0] + fam.denA[1] * x1 + fam.denA[2] * x1 * x1
    B = fam.denB[0] + fam.denB[1] * x1 + fam.denB[2] * x1 * x1
    C = fam.denC[0] + fam.denC[1] * x1 + fam.denC[2] * x1 * x1
    m = len(fam.terms)
    off = np.empty((m, x1.size))
    slope = np.empty(m)
    power = np.empty(m)
    kind = np.empty(m, dtype=np.int8)
    for j, (o0, o1, sl, pw, kd) in enumerate(fam.terms):
        off[j] = o0 + o1 * x1
        slope[j] = sl
        power[j] = pw
        kind[j] = kd
    vals = _kernels.inner_sweep(A, B, C, float(lo), float(hi), off, slope, power, kind, fam.b2, glx, glw)
    return float(w1 @ vals)


def _annulus_rects(R1, R2):
    return (
        (-R2, -R1, -R2, R2),
        (R1, R2, -R2, R2),
        (-R1, R1, -R2, -R1),
        (-R1, R1, R1, R2),
    )


@dataclass
class QuadReport:
    radii: list = field(default_factory=list)
    increments: list = field(default_factory=list)
    partials: list = field(default_factory=list)
    converged: bool = False
    achieved_tol: float = math.inf
    form: str = "direct"
    tail_slope: float = 0.0  # log increments vs log radius, last shells

    @property
    def value(self) -> float:
        return self.partials[-1] if self.partials else 0.0

    @property
    def tail_estimate(self) -> float:
        """Geometric extrapolation of the missing tail (0 when not applicable)."""
        if len(self.increments) < 2 or self.partials[-1] <= 0.0:
            return 0.0
        d1, d0 = self.increments[-1], self.increments[-2]
        if d0 <= 0.0 or d1 <= 0.0:
            return 0.0
        q = d1 / d0
        if q >= 0.95:
            return 0.0
        scale = self.partials[-1] / sum(self.increments)
        return d1 * q / (1.0 - q) * scale

    @property
    def value_extrapolated(self) -> float:
        return self.value + self.tail_estimate


def _loglog_slope(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = y > 0
    if keep.sum() < 2:
        return 0.0
    return float(np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)[0])


def _run_ladder(fam: _Family, quad: QuadSpec, radii=None, stop_on_converged=True, stop_on_divergent=False):
    if radii is None:
        radii = []
        R = fam.R0
        while R <= quad.truncation_radius * (1.0 + 1e-9) and len(radii) < quad.max_refinements:
            radii.append(R)
            R *= 2.0
        if not radii:
            radii = [quad.truncation_radius]
    rep = QuadReport(form="")
    total = 0.0
    prev_R = None
    for j, R in enumerate(radii):
        if prev_R is None:
            inc = _integrate_rect(fam, -R, R, -R, R, quad.n_gl)
        else:
            inc = sum(_integrate_rect(fam, *rect, quad.n_gl) for rect in _annulus_rects(prev_R, R))
        total += inc
        rep.radii.append(R)
        rep.increments.append(inc)
        rep.partials.append(total * fam.prefactor)
        prev_R = R
        if total > 0.0:
            rep.achieved_tol = inc / total
        if stop_on_converged and j >= 2 and total > 0.0:
            if rep.increments[-1] <= quad.tolerance * total and rep.increments[-2] <= quad.tolerance * total:
                rep.converged = True
                break
        if stop_on_divergent and j >= 6:
            tail = rep.increments[-5:]
            if all(tail[k + 1] > tail[k] for k in range(4)):
                if _loglog_slope(rep.radii[-5:], rep.partials[-5:]) > 0.1:
                    break
    rep.tail_slope = _loglog_slope(rep.radii[-4:], rep.increments[-4:])
    if not rep.converged and rep.partials:
        # increments decaying at a clear log-log rate means the tail is under
        # control even when it is too heavy to meet `tolerance` at this R
        rep.converged = rep.tail_slope < -DICHOTOMY_SLOPE_TOL
    return rep


# -- public operations --------------------------------------------------------


def _pick_form(xi, y, form, params):
    if form != "auto":
        return form
    standard = abs(params.alpha) == 0.0 and params.beta == 1.0
    if standard and abs(xi) > 1.0:
        return "rescaled"
    return "direct"


def eval_I_report(xi, y, rho, b, quad=None, params=None, form="auto"):
    """Truncated quadrature of I(xi, y) with its convergence report."""
    if not (0.0 <= rho < 0.25):
        raise ValueError(f"rho={rho} outside [0, 1/4)")
    quad = quad or QuadSpec()
    params = params or PhaseParams(alpha=0.0, beta=1.0)
    use = _pick_form(xi, y, form, params)
    if use == "rescaled":
        if abs(xi) <= 0.0:
            raise ValueError("rescaled form needs xi != 0")
        z = y / xi**3
        if z < 0.0:
            use = "direct"  # rescaled scans assume z >= 0
    if use == "rescaled":
        fam = _rescaled_family(xi, z, rho, b)
    else:
        fam = _direct_family(xi, y, rho, b, params)
    rep = _run_ladder(fam, quad)
    rep.form = use
    return rep


def eval_I(xi, y, rho, b, quad=None, params=None, form="auto"):
    """I(xi, y) as a number; raises QuadratureError when the tail is not under control."""
    rep = eval_I_report(xi, y, rho, b, quad=quad, params=params, form=form)
    if not rep.converged:
        raise QuadratureError(
            f"tail not under control at R={rep.radii[-1]:g} "
            f"(last increment / total = {rep.achieved_tol:.2e})",
            partial=rep.value,
            achieved_tol=rep.achieved_tol,
        )
    return rep.value


@dataclass
class DichotomyVerdict:
    """Convergent/divergent classification of I(0,0) from shell partial integrals."""

    regime: str  # convergent | divergent | near_threshold
    tail_slope: float  # log partial-integral vs log radius
    radii: list
    partial_integrals: list
    increment_slope: float = 0.0

    @property
    def is_divergent(self) -> bool:
        return self.regime == "divergent"


def dichotomy_I00(rho, b, radii=None, quad=None) -> DichotomyVerdict:
    """Classify I(0,0) at (rho, b): finite iff b > rho + 1/3 (sharp).

    Divergent means the partial integrals grow at log-log slope above
    +0.02; convergent means the shell increments decay at slope below
    -0.02; anything else is reported as near-threshold, not a failure.
    """
    if not (0.0 <= rho < 0.25):
        raise ValueError(f"rho={rho} outside [0, 1/4)")
    if b <= 0.0:
        raise ValueError("b must be positive")
    quad = quad or QuadSpec(truncation_radius=4096.0, max_refinements=11)
    fam = _direct_family(0.0, 0.0, rho, b, PhaseParams(alpha=0.0, beta=1.0))
    if radii is None:
        radii = [4.0 * 2.0**j for j in range(quad.max_refinements)]
    rep = _run_ladder(fam, quad, radii=list(radii), stop_on_converged=False, stop_on_divergent=True)
    n_fit = min(5, len(rep.radii))
    total_slope = _loglog_slope(rep.radii[-n_fit:], rep.partials[-n_fit:])
    incr_slope = _loglog_slope(rep.radii[-n_fit:], rep.increments[-n_fit:])
    # decaying increments decide convergence first: a convergent integral with
    # a heavy tail still shows a (vanishing) positive slope in its partials
    if incr_slope < -DICHOTOMY_SLOPE_TOL:
        regime = "convergent"
    elif total_slope > DICHOTOMY_SLOPE_TOL:
        regime = "divergent"
    else:
        regime = "near_threshold"
    return DichotomyVerdict(
        regime=regime,
        tail_slope=total_slope,
        radii=rep.radii,
        partial_integrals=rep.partials,
        increment_slope=incr_slope,
    )


@dataclass
class PointResult:
    xi: float
    y: float
    z: float
    value: float
    converged: bool
    form: str
    tail_slope: float = 0.0
    error: str | None = None


@dataclass
class BoundReport:
    """Sup of a quantity over a parameter scan, with per-point diagnostics."""

    label: str
    points: list
    sup: float
    argmax: tuple
    failures: int

    @classmethod
    def from_points(cls, label, points):
        # non-converged points keep their partial value: a diverging point
        # must drive the sup up under refinement, not vanish from it
        finite = [p for p in points if math.isfinite(p.value)]
        if finite:
            best = max(finite, key=lambda p: p.value)
            sup, arg = best.value, (best.xi, best.y)
        else:
            sup, arg = math.nan, (math.nan, math.nan)
        return cls(
            label=label,
            points=points,
            sup=sup,
            argmax=arg,
            failures=sum(1 for p in points if p.error is not None),
        )


def default_xi_grid(n_per_decade=2, xi_max=1000.0):
    """Log-spaced |xi| ladder in [1/4, xi_max], both signs, plus {0, +-1}."""
    n = max(2, int(round(n_per_decade * math.log10(4.0 * xi_max))))
    mags = np.geomspace(0.25, xi_max, n)
    out = sorted({0.0, 1.0, -1.0} | {float(v) for v in mags} | {float(-v) for v in mags})
    return out


def uniform_bound_scan(rho, b, xi_grid=None, z_grid=None, quad=None, params=None) -> BoundReport:
    """Sup of eval_I over a log-spaced (xi, y) grid, y = xi^3 z (plus y=0 slices).

    Points where the quadrature flags an uncontrolled tail are recorded,
    not raised; the scan is the oracle for the uniform-boundedness claim,
    so a diverging point must surface in the report rather than abort it.
    """
    quad = quad or QuadSpec()
    params = params or PhaseParams(alpha=0.0, beta=1.0)
    if xi_grid is None:
        xi_grid = default_xi_grid()
    if z_grid is None:
        z_grid = [0.0, 0.5, 2.0, 8.0]
    points = []
    seen = set()
    for xi in xi_grid:
        for z in z_grid:
            y = xi**3 * z
            key = (round(xi, 12), round(y, 12))
            if key in seen:
                continue
            seen.add(key)
            rep = eval_I_report(xi, y, rho, b, quad=quad, params=params)
            err = None if rep.converged else f"tail slope not under control at R={rep.radii[-1]:g}"
            points.append(
                PointResult(
                    xi=xi, y=y, z=z, value=rep.value, converged=rep.converged,
                    form=rep.form, tail_slope=rep.tail_slope, error=err,
                )
            )
    return BoundReport.from_points(f"sup I(xi,y) at rho={rho}, b={b}", points)


@dataclass
class PropositionReport:
    j1: BoundReport
    j2: BoundReport


def proposition_checks(rho, b, xi_list, z_list, quad=None) -> PropositionReport:
    """Evaluate the auxiliary bounds J1 (needs |xi|>1, rho<1/4) and J2 per point."""
    if not (0.0 <= rho < 0.25):
        raise ValueError(f"rho={rho} outside [0, 1/4)")
    quad = quad or QuadSpec()
    j1_pts, j2_pts = [], []
    for xi in xi_list:
        for z in z_list:
            fam2 = _j2_family(xi, z, rho, b)
            rep2 = _run_ladder(fam2, quad)
            j2_pts.append(
                PointResult(
                    xi=xi,
                    y=xi**3 * z,
                    z=z,
                    value=rep2.value,
                    converged=rep2.converged,
                    form="rescaled",
                    tail_slope=rep2.tail_slope,
                    error=None if rep2.converged else "tail not under control",
                )
            )
            if abs(xi) > 1.0:
                fam1 = _j1_family(xi, z, rho, b)
                rep1 = _run_ladder(fam1, quad)
                j1_pts.append(
                    PointResult(
                        xi=xi,
                        y=xi**3 * z,
                        z=z,
                        value=rep1.value,
                        converged=rep1.converged,
                        form="rescaled",
                        tail_slope=rep1.tail_slope,
                        error=None if rep1.converged else "tail not under control",
                    )
                )
    return PropositionReport(
        j1=BoundReport.from_points(f"J1 at rho={rho}, b={b}", j1_pts),
        j2=BoundReport.from_points(f"J2 at rho={rho}, b={b}", j2_pts),
    )
