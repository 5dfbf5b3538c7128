"""Random field generators shared by the probes and the trilinear search.

All generators are band-limited: the torus modulation weights are only
faithful while the dispersion curve tau = phi(xi) stays inside the tau
lattice, so spatial content is kept below a band with phi(band) well
inside the box.  Everything is seeded explicitly.
"""

from __future__ import annotations

import numpy as np

from .params import PhaseParams, SpaceTimeGrid
from .spectral import phase_symbol, sobolev_norm


def random_initial_data(
    grid: SpaceTimeGrid,
    seed: int,
    band: float = 3.0,
    s_norm: float | None = 0.0,
    amplitude: float = 1.0,
) -> np.ndarray:
    """Random smooth spatial spectrum, hard-banded to |xi| <= band.

    When s_norm is given the result is normalized to `amplitude` in H^{s_norm};
    otherwise amplitude scales the raw Gaussian draw.
    """
    rng = np.random.default_rng(seed)
    u = rng.standard_normal(grid.Nx) + 1j * rng.standard_normal(grid.Nx)
    u *= np.exp(-((grid.xi / band) ** 2))
    u[np.abs(grid.xi) > band] = 0.0
    if s_norm is not None:
        nrm = sobolev_norm(u, s_norm, grid)
        if nrm > 0:
            u *= amplitude / nrm
        return u
    return amplitude * u


def gaussian_spacetime_field(grid: SpaceTimeGrid, params: PhaseParams, rng, band: float = 2.5):
    """Complex Gaussian spectrum with a random envelope around the dispersion curve."""
    xi0 = rng.uniform(0.8, band)
    tau0 = rng.uniform(2.0, 8.0)
    mod = grid.tau[None, :] - phase_symbol(grid.xi, params)[:, None]
    env = np.exp(-((grid.xi[:, None] / xi0) ** 2) - (mod / tau0) ** 2)
    env[np.abs(grid.xi) > band, :] = 0.0
    noise = rng.standard_normal(env.shape) + 1j * rng.standard_normal(env.shape)
    return noise * env


def packet_spacetime_field(grid: SpaceTimeGrid, params: PhaseParams, rng, band: float = 2.5):
    """Frequency-localized packet: a thin Gaussian slab along the curve.

    Discrete cousin of the counterexample data, at random center/widths.
    """
    xi_c = rng.uniform(-band, band)
    mu_c = rng.uniform(-6.0, 6.0)
    w_xi = rng.uniform(0.2, 1.0)
    w_mu = rng.uniform(0.5, 3.0)
    mod = grid.tau[None, :] - phase_symbol(grid.xi, params)[:, None]
    env = np.exp(
        -(((grid.xi[:, None] - xi_c) / w_xi) ** 2) - ((mod - mu_c) / w_mu) ** 2
    )
    env[np.abs(grid.xi) > band, :] = 0.0
    phase = np.exp(2j * np.pi * rng.random())
    return env * phase


def localized_forcing(grid: SpaceTimeGrid, params: PhaseParams, seed: int, band: float = 3.0):
    """Random physical space-time field, band-limited and supported in |t| <= 4."""
    rng = np.random.default_rng(seed)
    F = gaussian_spacetime_field(grid, params, rng, band=band)
    from .spectral import spacetime_to_physical  # local import avoids a cycle at module load

    phys = spacetime_to_physical(F, grid)
    from .xsb import smooth_cutoff

    return phys * smooth_cutoff(grid.t / 2.0)[None, :]
