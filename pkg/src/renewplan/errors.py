"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: config problems -> 2, infeasible
planning problems -> 3, internal numerical failures -> 4.
"""


class RenewplanError(Exception):
    """Base class for all package errors."""


class ParameterError(RenewplanError, ValueError):
    """Invalid parameter or distribution specification."""


class InputError(RenewplanError, ValueError):
    """Malformed operation input (empty samples, length mismatch, ...)."""


class ModelAssumptionError(RenewplanError):
    """A closed-form formula was called outside its validity region."""


class InfeasibleError(RenewplanError):
    """The planning problem has no feasible solution for the given targets.

    Carries a ``details`` dict with machine-readable context (attainable
    probability ranges, violated condition, ...).
    """

    def __init__(self, message: str, details: dict | None = None):
        super().__init__(message)
        self.details = details or {}


class UnsupportedRegimeError(RenewplanError):
    """Requested a derivation that only exists in the interior regime."""


class ConfigError(RenewplanError, ValueError):
    """Scenario configuration failed to parse or validate."""


class NumericalError(RenewplanError):
    """Internal numerical procedure failed to converge or self-check."""
