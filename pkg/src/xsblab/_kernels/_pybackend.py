"""NumPy implementations of the hot kernels.

Two inner loops dominate the laboratory's runtime:

* `inner_sweep` -- for each outer quadrature node, integrate
      prod_i f_i(l_i(x))  /  (1 + |A x^2 + B x + C|)^(2b)
  over an interval, where l_i are affine forms and f_i is either the
  bracket 1+|.| or |.| raised to a power.  The denominator has sharp,
  thin ridges along its real roots, so the mesh is graded geometrically
  around each root (and around the kinks of the numerator brackets).

* `conv_counts` -- membership counting for the Monte Carlo triple
  convolution of slab indicators.

The compiled extension (`_cykernels`) implements the same functions with
identical segmentation logic; results agree to rounding.  This module is
the always-available fallback and the reference for the agreement tests.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND_NAME = "python"

# mesh grading: peak ladders double 6 times then grow 4x; kink ladders grow 4x
_PEAK_SLOW_LEVELS = 6
_PEAK_GROWTH = 4.0
_KINK_GROWTH = 4.0
_MAX_LEVELS = 96
_DEDUPE_REL = 1e-13


def build_points(lo: float, hi: float, peak_pos, peak_width, kink_pos, kink_width) -> np.ndarray:
    """Sorted breakpoints of a graded mesh on [lo, hi].

    Peaks get a two-sided geometric ladder starting at their width scale;
    kinks get a coarser one.  Positions may lie outside [lo, hi]; only
    in-range ladder points are kept (a ridge just outside the interval
    still steepens the integrand inside it).
    """
    span = hi - lo
    pts = [lo, hi]
    for k, kw in zip(kink_pos, kink_width):
        if k - lo < -2.0 * span or k - hi > 2.0 * span:
            continue
        if lo < k < hi:
            pts.append(k)
        d = min(max(kw, span * _DEDUPE_REL), span)
        for _ in range(_MAX_LEVELS):
            for p in (k - d, k + d):
                if lo < p < hi:
                    pts.append(p)
            if d > 2.0 * span:
                break
            d *= _KINK_GROWTH
    for r, w in zip(peak_pos, peak_width):
        if r - lo < -2.0 * span or r - hi > 2.0 * span:
            continue
        if lo < r < hi:
            pts.append(r)
        d = min(max(w, span * _DEDUPE_REL), span)
        level = 0
        for _ in range(_MAX_LEVELS):
            for p in (r - d, r + d):
                if lo < p < hi:
                    pts.append(p)
            if d > 2.0 * span:
                break
            d *= 2.0 if level < _PEAK_SLOW_LEVELS else _PEAK_GROWTH
            level += 1
    pts.sort()
    out = [pts[0]]
    tol = span * _DEDUPE_REL
    for p in pts[1:]:
        if p - out[-1] > tol:
            out.append(p)
    if len(out) == 1:
        out.append(hi)
    return np.asarray(out)


def _quad_structure(a: float, b: float, c: float, span: float):
    """Classify D(x) = a x^2 + b x + c and locate its near-zero ridges.

    Returns (mode, r1, r2, peaks) where mode is 0 factored-real,
    1 completed-square (r1=center, r2=offset^2), 2 linear (r1=root),
    3 constant, and peaks is a list of (position, width) pairs.
    """
    qa = abs(a) * span * span
    qb = abs(b) * span
    qc = abs(c)
    scale = max(qa, qb, qc, 1e-300)
    inv_span = 1.0 / span
    if qa > 1e-12 * scale:
        disc = b * b - 4.0 * a * c
        if disc > 0.0:
            sq = math.sqrt(disc)
            q = -0.5 * (b + math.copysign(sq, b)) if b != 0.0 else 0.5 * sq
            r1 = q / a
            r2 = c / q if q != 0.0 else -r1
            peaks = []
            for r in (r1, r2):
                d_slope = abs(2.0 * a * r + b)
                peaks.append((r, 1.0 / (d_slope + math.sqrt(2.0 * abs(a)) + inv_span)))
            return 0, r1, r2, peaks
        xc = -b / (2.0 * a)
        p2 = -disc / (4.0 * a * a)
        return 1, xc, p2, [(xc, 1.0 / (math.sqrt(2.0 * abs(a)) + inv_span))]
    if qb > 1e-12 * scale:
        r = -c / b
        return 2, r, 0.0, [(r, 1.0 / (abs(b) + inv_span))]
    return 3, 0.0, 0.0, []


def inner_sweep(
    A: np.ndarray,
    B: np.ndarray,
    C: np.ndarray,
    lo: float,
    hi: float,
    term_off: np.ndarray,
    term_slope: np.ndarray,
    term_pow: np.ndarray,
    term_kind: np.ndarray,
    b2: float,
    glx: np.ndarray,
    glw: np.ndarray,
) -> np.ndarray:
    """Per-outer-node inner integrals; see module docstring.

    A, B, C: (n,) quadratic coefficients of the denominator argument.
    term_off: (m, n) affine offsets per numerator term and node;
    term_slope/pow/kind: (m,) with kind 0 = bracket, 1 = plain |.|.
    """
    n = A.shape[0]
    m = term_off.shape[0]
    out = np.empty(n)
    span = hi - lo
    inv_span = 1.0 / span
    for i in range(n):
        mode, r1, r2, peaks = _quad_structure(A[i], B[i], C[i], span)
        kp, kw = [], []
        for j in range(m):
            sl = term_slope[j]
            if sl != 0.0:
                kp.append(-term_off[j, i] / sl)
                kw.append(1.0 / (abs(sl) + inv_span))
        pts = build_points(lo, hi, [p for p, _ in peaks], [w for _, w in peaks], kp, kw)
        mid = 0.5 * (pts[1:] + pts[:-1])
        half = 0.5 * (pts[1:] - pts[:-1])
        x = (mid[:, None] + half[:, None] * glx[None, :]).ravel()
        w = (half[:, None] * glw[None, :]).ravel()
        f = np.ones_like(x)
        for j in range(m):
            v = np.abs(term_off[j, i] + term_slope[j] * x)
            if term_kind[j] == 0:
                v += 1.0
            if term_pow[j] != 0.0:
                f *= v ** term_pow[j]
        if mode == 0:
            d = A[i] * (x - r1) * (x - r2)
        elif mode == 1:
            d = A[i] * ((x - r1) ** 2 + r2)
        elif mode == 2:
            d = B[i] * (x - r1)
        else:
            d = np.full_like(x, C[i])
        f *= np.exp(-b2 * np.log1p(np.abs(d)))
        out[i] = w @ f
    return out


def conv_counts(
    xi1: np.ndarray,
    mu1: np.ndarray,
    xi2: np.ndarray,
    mu2: np.ndarray,
    xi_t: np.ndarray,
    tau_t: np.ndarray,
    N: float,
    delta: float,
    alpha: float,
    beta: float,
) -> np.ndarray:
    """Count cloud pairs (x, y) in B x B with x + y - target in B, per target.

    Cloud points are (xi, phi(xi)+mu); the slab is N <= xi <= N+delta,
    |tau - phi(xi)| <= 1.
    """
    sig = xi1 + xi2
    tau_base = (alpha * xi1**2 + beta * xi1**3 + mu1) + (alpha * xi2**2 + beta * xi2**3 + mu2)
    counts = np.empty(xi_t.shape[0], dtype=np.int64)
    chunk = max(1, int(4e6) // max(1, xi1.shape[0]))
    for start in range(0, xi_t.shape[0], chunk):
        xt = xi_t[start : start + chunk, None]
        tt = tau_t[start : start + chunk, None]
        xs = sig[None, :] - xt
        ok = (xs >= N) & (xs <= N + delta)
        mod = tau_base[None, :] - tt - (alpha * xs**2 + beta * xs**3)
        ok &= np.abs(mod) <= 1.0
        counts[start : start + chunk] = ok.sum(axis=1)
    return counts
