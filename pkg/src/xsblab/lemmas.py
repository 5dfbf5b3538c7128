"""Quadrature checks of the four elementary calculus inequalities.

Each check computes the left-hand integral numerically and multiplies by
the claimed right-hand decay, so the result should sit in a bracket
[c, C] independent of the translation/scale parameters; scan drivers
assert exactly that.  One-dimensional integrals go through
scipy.integrate.quad with explicit singular-point splitting; the
sup-style inequality (el3) is a grid maximization with refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import QuadratureError
from .spectral import bracket

_QUAD_OPTS = dict(epsabs=1e-11, epsrel=1e-9, limit=200)


def _quad_pieces(f, breakpoints):
    """Integrate f over R split at the given interior breakpoints."""
    pts = sorted(breakpoints)
    total = 0.0
    err = 0.0
    segments = [(-math.inf, pts[0])]
    segments += [(pts[i], pts[i + 1]) for i in range(len(pts) - 1)]
    segments += [(pts[-1], math.inf)]
    for a, b in segments:
        v, e = integrate.quad(f, a, b, **_QUAD_OPTS)
        total += v
        err += e
    if not math.isfinite(total):
        raise QuadratureError("integral did not converge", partial=total, achieved_tol=err)
    return total, err


def check_el1(a1: float, a2: float, b: float, tol_check: bool = True) -> float:
    """integral dx / (<x-a1><x-a2>)^{2b}, times <a1-a2>^{2b}.

    Finite for b > 1/2; the normalized value stays in a parameter-free
    bracket, which is what the scan asserts.
    """
    if b <= 0.5:
        raise ValueError(f"b={b} must exceed 1/2")

    def f(x):
        return (bracket(x - a1) * bracket(x - a2)) ** (-2.0 * b)

    val, err = _quad_pieces(f, [a1, a2] if a1 != a2 else [a1])
    if tol_check and err > 1e-6 * max(val, 1e-300):
        raise QuadratureError("el1 quadrature noisy", partial=val, achieved_tol=err / val)
    return val * bracket(a1 - a2) ** (2.0 * b)


def check_el2(a1: float, a2: float, c1: float, c2: float) -> float:
    """integral dx / (|x-a1|^{c1} |x-a2|^{c2}), times |a1-a2|^{c1+c2-1}.

    Needs 0 < c1, c2 < 1 and c1 + c2 > 1 (integrable singularities, decaying
    tail).  The singular windows are integrated with the local power-law
    factored out analytically; quad handles the remainder.
    """
    if not (0.0 < c1 < 1.0 and 0.0 < c2 < 1.0):
        raise ValueError("need 0 < c1, c2 < 1")
    if c1 + c2 <= 1.0:
        raise ValueError("need c1 + c2 > 1")
    if a1 == a2:
        raise ValueError("need a1 != a2")
    gap = abs(a1 - a2)
    w = 0.1 * gap

    def f(x):
        return abs(x - a1) ** (-c1) * abs(x - a2) ** (-c2)

    total = 0.0
    # singular windows: |x - ai| < w, other factor expanded at the endpoints
    for (ai, ci, aj, cj) in ((a1, c1, a2, c2), (a2, c2, a1, c1)):
        # integral over |t| < w of t^{-ci} * |ai + t - aj|^{-cj} dt by
        # Gauss-Legendre in the variable u = t^{1-ci} (absorbs the singularity)
        u_max = w ** (1.0 - ci)
        un, uw = np.polynomial.legendre.leggauss(64)
        for sign in (-1.0, 1.0):
            u = 0.5 * u_max * (un + 1.0)
            t = sign * u ** (1.0 / (1.0 - ci))
            other = np.abs(ai + t - aj) ** (-cj)
            total += float(np.sum(0.5 * u_max * uw * other)) / (1.0 - ci)
    # smooth remainder
    lo, hi = min(a1, a2), max(a1, a2)
    mid_pts = []
    if hi - w > lo + w:
        mid_pts = [lo + w, hi - w]
    for a, b_ in [(-math.inf, lo - w)] + ([tuple(mid_pts)] if mid_pts else []) + [(hi + w, math.inf)]:
        v, _ = integrate.quad(f, a, b_, **_QUAD_OPTS)
        total += v
    return total * gap ** (c1 + c2 - 1.0)


@dataclass
class SupReport:
    sup: float
    arg: float
    refined_change: float


def check_el3(a: float, c1: float, c2: float, n_grid: int = 20001, x_max: float = 1e6) -> SupReport:
    """sup_x |x|^{c1} <a x>^{-c2} * a^{c1}; requires c1 <= c2, a > 0.

    Grid maximization over a symmetric log grid, one refinement pass around
    the argmax; the refined change is reported so stability is checkable.
    """
    if c1 > c2:
        raise ValueError("need c1 <= c2")
    if a <= 0:
        raise ValueError("need a > 0")

    def f(x):
        return np.abs(x) ** c1 * bracket(a * x) ** (-c2) * a**c1

    xs = np.concatenate([[0.0], np.geomspace(1e-8 / a, x_max / a, n_grid)])
    vals = f(xs)
    i = int(np.argmax(vals))
    sup0, arg0 = float(vals[i]), float(xs[i])
    lo = xs[max(0, i - 1)]
    hi = xs[min(len(xs) - 1, i + 1)]
    fine = np.linspace(lo, hi, 4001)
    vals2 = f(fine)
    j = int(np.argmax(vals2))
    sup1, arg1 = float(vals2[j]), float(fine[j])
    if sup1 >= sup0:
        return SupReport(sup=sup1, arg=arg1, refined_change=(sup1 - sup0) / max(sup0, 1e-300))
    return SupReport(sup=sup0, arg=arg0, refined_change=0.0)


def check_el4(a: float, eta: float, b: float) -> float:
    """integral dx / <a (x^2 - eta^2)>^{2b}, times |a * eta|; b > 1/2."""
    if b <= 0.5:
        raise ValueError(f"b={b} must exceed 1/2")
    if a == 0 or eta == 0:
        raise ValueError("need a != 0 and eta != 0")

    def f(x):
        return bracket(a * (x * x - eta * eta)) ** (-2.0 * b)

    val, err = _quad_pieces(f, [-abs(eta), 0.0, abs(eta)])
    if err > 1e-6 * max(val, 1e-300):
        raise QuadratureError("el4 quadrature noisy", partial=val, achieved_tol=err / val)
    return val * abs(a * eta)


def lemma_scan(b: float = 0.75, c1: float = 0.6, c2: float = 0.6) -> dict:
    """Run the four checks over two-decade parameter ladders.

    Returns, for each inequality, the normalized values and their max/min
    spread; a bounded spread across the ladder is the numerical content of
    the lemma.
    """
    ladder = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0]
    out = {}
    out["el1"] = {"params": ladder, "values": [check_el1(0.0, d, b) for d in ladder]}
    out["el2"] = {"params": ladder, "values": [check_el2(0.0, d, c1, c2) for d in ladder]}
    el3_vals = [check_el3(a, 0.5, 1.0).sup for a in ladder]
    out["el3"] = {"params": ladder, "values": el3_vals}
    out["el4"] = {"params": ladder, "values": [check_el4(1.0, eta, b) for eta in ladder]}
    for key, rec in out.items():
        vals = rec["values"]
        rec["spread"] = max(vals) / min(vals)
    return out
