"""Discrete X^{s,b} space-time norms and smooth time windowing."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import WindowError
from .params import PhaseParams, SpaceTimeGrid
from .spectral import bracket, phase_symbol


@dataclass(frozen=True)
class XsbIndex:
    """Norm indices: spatial weight s, modulation weight b, dual index b'.

    rho = -s is carried alongside because the resonance-integral machinery is
    parameterized by it.  The trilinear window is -1/4 < s <= 0 with
    7/12 < b < 11/12; the inhomogeneous (Duhamel) estimates use
    -1/2 < b' <= 0 <= b <= b'+1.  Constructors do not enforce these windows
    (scans deliberately step outside them); `validate_trilinear` /
    `validate_duhamel` check them on demand.
    """

    s: float
    b: float
    b_prime: float = 0.0

    @property
    def rho(self) -> float:
        return -self.s if self.s <= 0 else 0.0

    def validate_trilinear(self):
        errs = []
        if not (-0.25 < self.s <= 0.0):
            errs.append(f"s={self.s} outside (-1/4, 0]")
        if not (7.0 / 12.0 < self.b < 11.0 / 12.0):
            errs.append(f"b={self.b} outside (7/12, 11/12)")
        return errs

    def validate_duhamel(self):
        errs = []
        if not (-0.5 < self.b_prime <= 0.0):
            errs.append(f"b'={self.b_prime} outside (-1/2, 0]")
        if not (0.0 <= self.b <= self.b_prime + 1.0):
            errs.append(f"b={self.b} outside [0, b'+1]")
        return errs


# -- smooth cutoff -----------------------------------------------------------


def _glue(x):
    """e^{-1/x} for x > 0, 0 otherwise (the standard smooth step ingredient)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def smooth_cutoff(t):
    """psi(t): smooth, 1 on |t| <= 1, 0 on |t| >= 2, monotone in between.

    Built from the e^{-1/x} glue so the plateaus are exact, matching the
    support conditions the windowed estimates rely on.
    """
    t = np.abs(np.asarray(t, dtype=float))
    up = _glue(2.0 - t)
    down = _glue(t - 1.0)
    with np.errstate(invalid="ignore"):
        val = up / (up + down)
    val = np.where(t <= 1.0, 1.0, val)
    val = np.where(t >= 2.0, 0.0, val)
    return val


@dataclass(frozen=True)
class TimeWindow:
    """psi_T(t) = psi(t/T); kind='none' is the identity window."""

    kind: str = "smooth_bump"  # smooth_bump | none
    T: float = 1.0

    def __post_init__(self):
        if self.kind not in ("smooth_bump", "none"):
            raise ValueError(f"unknown window kind {self.kind!r}")
        if self.kind == "smooth_bump" and self.T <= 0:
            raise ValueError("window scale T must be positive")

    def profile(self, t):
        if self.kind == "none":
            return np.ones_like(np.asarray(t, dtype=float))
        return smooth_cutoff(np.asarray(t, dtype=float) / self.T)


def apply_time_window(u: np.ndarray, window: TimeWindow, grid: SpaceTimeGrid) -> np.ndarray:
    """Multiply a physical space-time field (Nx, Nt) by psi_T(t).

    Requires 4*T <= T_span so the support [-2T, 2T] sits strictly inside the
    time box and the temporal DFT sees a compactly supported signal (no
    wrap-around leaking into the modulation weights).
    """
    grid.check_spacetime(u)
    if window.kind == "none":
        return u.copy()
    if 4.0 * window.T > grid.T_span:
        raise WindowError(
            f"window scale T={window.T} too wide: need T <= T_span/4 = {grid.T_span / 4.0}"
        )
    return u * window.profile(grid.t)[np.newaxis, :]


# -- the norm ----------------------------------------------------------------


def xsb_weight(idx: XsbIndex, params: PhaseParams, grid: SpaceTimeGrid, b: float | None = None) -> np.ndarray:
    """Lattice of <xi>^s <tau - phi(xi)>^b weights, shape (Nx, Nt)."""
    bb = idx.b if b is None else b
    mod = grid.tau[np.newaxis, :] - phase_symbol(grid.xi, params)[:, np.newaxis]
    return bracket(grid.xi)[:, np.newaxis] ** idx.s * bracket(mod) ** bb


def xsb_norm(
    F: np.ndarray,
    idx: XsbIndex,
    params: PhaseParams,
    grid: SpaceTimeGrid,
    b: float | None = None,
) -> float:
    """X^{s,b} norm of a (xi, tau) spectrum F, with the (2pi/L)(2pi/T_span) cell measure.

    Pass `b` to override idx.b (used for the b-1 side of the trilinear form).
    """
    grid.check_spacetime(F)
    w = xsb_weight(idx, params, grid, b=b)
    return float(np.sqrt(np.sum((w * np.abs(F)) ** 2) * grid.cell_area))
