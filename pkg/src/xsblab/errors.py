"""Exception types shared across the package."""

from __future__ import annotations


class XsbLabError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(XsbLabError):
    """Array shape does not match the grid it claims to live on."""

    def __init__(self, expected, got):
        self.expected = tuple(expected) if hasattr(expected, "__iter__") else (expected,)
        self.got = tuple(got) if hasattr(got, "__iter__") else (got,)
        super().__init__(f"expected shape {self.expected}, got {self.got}")


class WindowError(XsbLabError):
    """Time window incompatible with the grid (too wide to resolve)."""


class NonPositiveValueError(XsbLabError):
    """Log-log regression input contains a value <= 0."""


class QuadratureError(XsbLabError):
    """Quadrature failed to meet its tolerance.

    Carries the partial value and the achieved relative tolerance so callers
    can decide whether the partial result is still usable.
    """

    def __init__(self, message, partial=None, achieved_tol=None):
        self.partial = partial
        self.achieved_tol = achieved_tol
        super().__init__(message)


class SamplingError(XsbLabError):
    """Monte Carlo sampling error above the requested threshold."""

    def __init__(self, message, relative_error=None):
        self.relative_error = relative_error
        super().__init__(message)


class BlowUpError(XsbLabError):
    """Solver state became non-finite; carries the estimated blow-up time."""

    def __init__(self, t_estimate):
        self.t_estimate = t_estimate
        super().__init__(f"state became non-finite near t = {t_estimate:.6g}")


class ContractionError(XsbLabError):
    """Fixed-point residuals stopped decreasing: outside the contraction regime."""

    def __init__(self, residuals):
        self.residuals = list(residuals)
        super().__init__(
            "residuals non-decreasing for 3 consecutive iterations: "
            f"{[format(r, '.3e') for r in self.residuals]}"
        )


class ValidationError(XsbLabError):
    """Experiment configuration violates one or more preconditions."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {v}" for v in self.violations))
