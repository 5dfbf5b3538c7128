"""Transforms, dispersion symbol, free propagator and Sobolev norms.

Conventions (derived in README.md, "Conventions"):

* Spectra hold samples of the continuum unitary Fourier transform,
  u_hat(xi) = (2*pi)^(-1/2) * integral u(x) e^(-i xi x) dx, discretized as
  u_hat_k = (dx / sqrt(2*pi)) * FFT(u)_k.  With this scaling the discrete
  Plancherel identity  sum |u_hat_k|^2 * (2*pi/L) = sum |u_n|^2 * dx  holds
  with equality, so weighted-lattice norms match their continuum analogues
  without grid-dependent constants.
* The equation's linear flow is diagonal: d/dt u_hat = i*phi(xi)*u_hat with
  phi(xi) = alpha*xi^2 + beta*xi^3, hence U(t) multiplies by e^{i t phi}.
  In space-time frequency the free solution sits on tau = phi(xi), which is
  what makes <tau - phi(xi)> the correct modulation weight.
"""

from __future__ import annotations

import numpy as np

from .params import PhaseParams, SpaceTimeGrid

_SQRT_2PI = np.sqrt(2.0 * np.pi)


def bracket(x):
    """Japanese bracket <x> = 1 + |x| (this convention, not (1+x^2)^(1/2))."""
    return 1.0 + np.abs(x)


def phase_symbol(xi, params: PhaseParams):
    """Dispersion symbol phi(xi) = alpha*xi^2 + beta*xi^3."""
    xi = np.asarray(xi, dtype=float)
    return params.alpha * xi**2 + params.beta * xi**3


# -- spatial transforms ------------------------------------------------------


def to_spectrum(u: np.ndarray, grid: SpaceTimeGrid) -> np.ndarray:
    """Physical samples on the x-grid -> continuum-scaled spectrum on xi_k."""
    grid.check_spatial(u)
    return (grid.dx / _SQRT_2PI) * np.fft.fft(u)


def to_physical(u_hat: np.ndarray, grid: SpaceTimeGrid) -> np.ndarray:
    """Inverse of :func:`to_spectrum`."""
    grid.check_spatial(u_hat)
    return (_SQRT_2PI / grid.dx) * np.fft.ifft(u_hat)


def dft_roundtrip(values: np.ndarray, grid: SpaceTimeGrid) -> np.ndarray:
    """Forward-then-inverse transform; returns the input up to rounding.

    Accepts a spatial array (Nx,) or a space-time array (Nx, Nt).  Exists as
    the testable contract for the transform pair.
    """
    if values.ndim == 1:
        return to_physical(to_spectrum(values, grid), grid)
    return spacetime_to_physical(spacetime_to_spectrum(values, grid), grid)


# -- space-time transforms ---------------------------------------------------


def spacetime_to_spectrum(u: np.ndarray, grid: SpaceTimeGrid) -> np.ndarray:
    """(x, t) samples, shape (Nx, Nt) -> continuum-scaled (xi, tau) spectrum.

    The time axis starts at t0 = -T_span/2, so the plain FFT is corrected by
    the phase e^{-i tau t0} to sample the genuine transform.
    """
    grid.check_spacetime(u)
    scale = grid.dx * grid.dt / (2.0 * np.pi)
    phase = np.exp(-1j * grid.tau * grid.t[0])
    return scale * np.fft.fft2(u) * phase[np.newaxis, :]


def spacetime_to_physical(F: np.ndarray, grid: SpaceTimeGrid) -> np.ndarray:
    """Inverse of :func:`spacetime_to_spectrum`."""
    grid.check_spacetime(F)
    scale = grid.dx * grid.dt / (2.0 * np.pi)
    phase = np.exp(1j * grid.tau * grid.t[0])
    return np.fft.ifft2(F * phase[np.newaxis, :]) / scale


# -- free evolution and norms ------------------------------------------------


def free_evolve(u_hat: np.ndarray, t: float, params: PhaseParams, grid: SpaceTimeGrid) -> np.ndarray:
    """Apply the free propagator U(t): multiply each mode by e^{i t phi(xi_k)}."""
    grid.check_spatial(u_hat)
    return u_hat * np.exp(1j * t * phase_symbol(grid.xi, params))


def free_trajectory(u_hat: np.ndarray, times: np.ndarray, params: PhaseParams, grid: SpaceTimeGrid) -> np.ndarray:
    """U(t)u0 for every t in `times`; returns spectra, shape (len(times), Nx)."""
    grid.check_spatial(u_hat)
    phases = np.exp(1j * np.multiply.outer(times, phase_symbol(grid.xi, params)))
    return phases * u_hat[np.newaxis, :]


def sobolev_norm(u_hat: np.ndarray, s: float, grid: SpaceTimeGrid) -> float:
    """H^s norm: ( sum <xi_k>^{2s} |u_hat_k|^2 * (2*pi/L) )^(1/2)."""
    grid.check_spatial(u_hat)
    w = bracket(grid.xi) ** (2.0 * s)
    return float(np.sqrt(np.sum(w * np.abs(u_hat) ** 2) * grid.dxi))


def l2_norm_physical(u: np.ndarray, grid: SpaceTimeGrid) -> float:
    """L^2 norm of physical samples on the spatial torus, (dx * sum |u|^2)^(1/2)."""
    grid.check_spatial(u)
    return float(np.sqrt(grid.dx * np.sum(np.abs(u) ** 2)))
