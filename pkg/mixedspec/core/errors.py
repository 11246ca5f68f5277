# mixedspec/core/errors.py
"""
Exception hierarchy for the solver and its verification harness.

Every class carries a class-level ``exit_code`` so the command line front end can
turn any failure into a stable process exit status, the same way a web layer turns
exceptions into HTTP status codes.
"""
from typing import List, Optional, Sequence


class MixedSpecError(Exception):
    """Base class for all errors raised by mixedspec."""
    exit_code: int = 4


class ConfigError(MixedSpecError, ValueError):
    """Raised when a run configuration cannot be parsed or validated."""
    exit_code = 2


class DomainError(MixedSpecError, ValueError):
    """Raised for coordinates outside the closed rectangle or invalid geometry."""
    exit_code = 2


class InvalidModeError(MixedSpecError, ValueError):
    """Raised for mode indices below 1."""
    exit_code = 2


class SeamAmbiguityError(MixedSpecError, ValueError):
    """Raised when a field is requested exactly on t = 0 without an explicit side."""
    exit_code = 2


class RejectedForcingError(MixedSpecError, ValueError):
    """Raised by solve when the forcing violates the compatibility hypotheses."""
    exit_code = 3

    def __init__(self, violations: Sequence) -> None:
        self.violations = list(violations)
        lines = [f"{v.code}: {v.message}" for v in self.violations]
        super().__init__("Forcing rejected:\n  " + "\n  ".join(lines))


class UnsupportedDerivativeError(MixedSpecError, ValueError):
    """Raised when a time derivative of the requested order is not available."""
    exit_code = 4


class InsufficientDataError(MixedSpecError, ValueError):
    """Raised when a decay fit has fewer usable coefficients than it needs."""
    exit_code = 4


class QuadratureError(MixedSpecError, ArithmeticError):
    """Raised when composite quadrature exhausts its panel budget."""
    exit_code = 4

    def __init__(self, estimate: complex, error_bound: float, panels: int) -> None:
        self.estimate = estimate
        self.error_bound = error_bound
        self.panels = panels
        super().__init__(
            f"Quadrature failed to converge with {panels} panels: "
            f"best estimate {estimate!r}, error bound {error_bound:.3e}"
        )


class StepSizeError(MixedSpecError, ValueError):
    """Raised when an oracle time step is too coarse for the accuracy guard."""
    exit_code = 4

    def __init__(self, step: float, max_step: float) -> None:
        self.step = step
        self.max_step = max_step
        super().__init__(
            f"Step {step:.6g} exceeds the accuracy guard; use h <= {max_step:.6g}"
        )


class StabilityError(MixedSpecError, ValueError):
    """Raised when the parabolic oracle is asked to march forward in time."""
    exit_code = 4


class CFLError(MixedSpecError, ValueError):
    """Raised when the leapfrog time step violates the CFL limit."""
    exit_code = 4

    def __init__(self, dt: float, limit: float) -> None:
        self.dt = dt
        self.limit = limit
        super().__init__(f"CFL violated: dt = {dt:.6g} > dx = {limit:.6g}")


def exit_code_for(exc: BaseException, default: Optional[int] = None) -> int:
    """Return the process exit code for an exception."""
    if isinstance(exc, MixedSpecError):
        return exc.exit_code
    return 4 if default is None else default


__all__: List[str] = [
    "MixedSpecError",
    "ConfigError",
    "DomainError",
    "InvalidModeError",
    "SeamAmbiguityError",
    "RejectedForcingError",
    "UnsupportedDerivativeError",
    "InsufficientDataError",
    "QuadratureError",
    "StepSizeError",
    "StabilityError",
    "CFLError",
    "exit_code_for",
]
