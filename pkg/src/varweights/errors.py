"""Exception types shared across the package."""

from __future__ import annotations


class VarweightsError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(VarweightsError):
    """A config document is malformed; ``path`` points at the offending key."""

    def __init__(self, path: str, message: str):
        self.path = path
        self.reason = message
        super().__init__(f"{path}: {message}")


class QuadratureError(VarweightsError):
    """The refinement ladder failed to converge to the requested tolerance.

    Carries the last two estimates so callers can inspect how far apart
    they were.
    """

    def __init__(self, message: str, estimates=()):
        self.estimates = tuple(estimates)
        super().__init__(message)


class NonIntegrableError(VarweightsError):
    """The integrand is not integrable on the cube.

    Raised either because a declared local power makes the integral
    divergent, or because refinement estimates grow without settling.
    The (possibly empty) ladder of estimates is kept for reporting.
    """

    def __init__(self, message: str, estimates=()):
        self.estimates = tuple(estimates)
        super().__init__(message)


class InfiniteModularError(NonIntegrableError):
    """The modular is infinite for every scaling, so the norm is infinite."""


class DomainError(VarweightsError):
    """Arguments violate a documented precondition."""
