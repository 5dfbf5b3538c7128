"""Equation coefficients and the discrete space-time grid."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError

_REAL_GAMMA_TOL = 1e-14


@dataclass(frozen=True)
class PhaseParams:
    """Coefficients of u_t + i*alpha*u_xx + beta*u_xxx + i*gamma*|u|^2 u = 0.

    The linear symbol is phi(xi) = alpha*xi^2 + beta*xi^3; beta must be
    nonzero (the cubic-dispersion case this laboratory targets).
    """

    alpha: float = 0.0
    beta: float = 1.0
    gamma: complex = 1.0 + 0.0j

    def __post_init__(self):
        if self.beta == 0.0:
            raise ValueError("beta must be nonzero")
        if not np.isfinite(self.alpha) or not np.isfinite(self.beta):
            raise ValueError("alpha, beta must be finite")

    @property
    def gamma_is_real(self) -> bool:
        """True when the nonlinearity is conservative (gates L^2-drift tests)."""
        return abs(complex(self.gamma).imag) < _REAL_GAMMA_TOL


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class SpaceTimeGrid:
    """Periodic box [0, L) x [-T_span/2, T_span/2) with Nx x Nt nodes.

    Frequencies are stored in canonical FFT order; `xi` and `tau` expose the
    signed lattices xi_k = 2*pi*k/L and tau_m = 2*pi*m/T_span.
    """

    L: float = 100.0
    Nx: int = 256
    T_span: float = 16.0
    Nt: int = 256

    x: np.ndarray = field(init=False, repr=False, compare=False)
    t: np.ndarray = field(init=False, repr=False, compare=False)
    xi: np.ndarray = field(init=False, repr=False, compare=False)
    tau: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.L <= 0 or self.T_span <= 0:
            raise ValueError("L and T_span must be positive")
        for name, n in (("Nx", self.Nx), ("Nt", self.Nt)):
            if n < 8 or not _is_pow2(n):
                raise ValueError(f"{name} must be a power of two >= 8, got {n}")
        object.__setattr__(self, "x", self.dx * np.arange(self.Nx))
        object.__setattr__(self, "t", -0.5 * self.T_span + self.dt * np.arange(self.Nt))
        object.__setattr__(self, "xi", 2.0 * np.pi * np.fft.fftfreq(self.Nx, d=self.dx))
        object.__setattr__(self, "tau", 2.0 * np.pi * np.fft.fftfreq(self.Nt, d=self.dt))

    @property
    def dx(self) -> float:
        return self.L / self.Nx

    @property
    def dt(self) -> float:
        return self.T_span / self.Nt

    @property
    def dxi(self) -> float:
        """Spacing of the xi lattice, 2*pi/L."""
        return 2.0 * np.pi / self.L

    @property
    def dtau(self) -> float:
        """Spacing of the tau lattice, 2*pi/T_span."""
        return 2.0 * np.pi / self.T_span

    @property
    def cell_area(self) -> float:
        """(2*pi/L) * (2*pi/T_span), the (xi, tau) cell measure."""
        return self.dxi * self.dtau

    @property
    def xi_max(self) -> float:
        return np.pi * self.Nx / self.L

    def check_spatial(self, values: np.ndarray) -> None:
        if values.shape != (self.Nx,):
            raise DimensionMismatchError((self.Nx,), values.shape)

    def check_spacetime(self, values: np.ndarray) -> None:
        if values.shape != (self.Nx, self.Nt):
            raise DimensionMismatchError((self.Nx, self.Nt), values.shape)
