"""Exception types shared across the package."""


class RelaySecError(Exception):
    """Base class for all package errors."""


class ArgumentError(RelaySecError, ValueError):
    """Malformed arguments: bad axis indices, mismatched alphabets, out-of-range powers."""


class NumericDomainError(RelaySecError, ArithmeticError):
    """A numeric quantity left its valid domain (indefinite covariance, negative MI)."""


class PreconditionError(RelaySecError, ValueError):
    """An operation was called on an input it is not defined for."""


class InfeasibleParamsError(RelaySecError, ValueError):
    """Covariance parameters that do not describe a PSD matrix."""

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class CapacityGuardError(RelaySecError, ValueError):
    """A search would be intractably large."""


class DegenerateGeometryError(RelaySecError, ValueError):
    """A transmitter and a receiver occupy the same point."""


class ConfigError(RelaySecError, ValueError):
    """A config file could not be parsed or failed validation."""
