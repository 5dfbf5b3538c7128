"""xsblab: a numerical laboratory for space-time weighted norms, a scaling
ill-posedness counterexample, resonance-integral bounds, and two
cross-validated solvers of the third-order cubic Schrodinger-type equation
u_t + i*alpha*u_xx + beta*u_xxx + i*gamma*|u|^2 u = 0."""

from ._kernels import BACKEND as kernel_backend
from .params import PhaseParams, SpaceTimeGrid
from .spectral import (
    bracket,
    dft_roundtrip,
    free_evolve,
    phase_symbol,
    sobolev_norm,
    to_physical,
    to_spectrum,
)
from .xsb import TimeWindow, XsbIndex, apply_time_window, xsb_norm

__version__ = "0.1.0"

__all__ = [
    "PhaseParams",
    "SpaceTimeGrid",
    "XsbIndex",
    "TimeWindow",
    "phase_symbol",
    "bracket",
    "free_evolve",
    "sobolev_norm",
    "xsb_norm",
    "apply_time_window",
    "to_spectrum",
    "to_physical",
    "dft_roundtrip",
    "kernel_backend",
    "__version__",
]
