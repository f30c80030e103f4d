"""Exception types shared across the package.

Numerical failures (a solver not converging, a matrix failing to factor)
are kept distinct from precondition violations (bad arguments, parameters
outside the admissible ranges) so that callers, and in particular the CLI,
can map them to different outcomes.
"""

__all__ = [
    "DiracHardyError",
    "PreconditionError",
    "TheoremHypothesisError",
    "EigensolverError",
    "SingularResolventError",
    "NoEigenvalueError",
    "NoValidShiftError",
    "ConfigError",
]


class DiracHardyError(Exception):
    """Base class for all package-specific errors."""


class PreconditionError(DiracHardyError, ValueError):
    """An argument violates a documented precondition."""


class TheoremHypothesisError(PreconditionError):
    """Potential parameters violate the admissibility hypothesis of the
    subcritical perturbation family (c1 + Gamma_cap - 1 must stay below
    sqrt(1 - nu^2))."""


class EigensolverError(DiracHardyError, RuntimeError):
    """The banded symmetric eigensolver failed to converge."""


class SingularResolventError(DiracHardyError, RuntimeError):
    """The form matrix is not positive definite at the requested shift, so
    the Schur-complement solve has no stable Cholesky factorization."""


class NoEigenvalueError(DiracHardyError, RuntimeError):
    """No sign change of the tracked form eigenvalue inside the search
    window; the margin at the window top is recorded for reporting."""

    def __init__(self, message: str, margin: float | None = None):
        super().__init__(message)
        self.margin = margin


class NoValidShiftError(DiracHardyError, RuntimeError):
    """The scan for the largest admissible Hardy shift found no value at
    which the inequality holds."""


class ConfigError(DiracHardyError, ValueError):
    """An experiment configuration file failed validation."""
