"""Exception types shared across the package."""


class NrlevyError(Exception):
    """Base class for all package errors."""


class DomainError(NrlevyError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class InadmissibleError(NrlevyError, ValueError):
    """The memory parameter is too large for the given characteristics (p * beta >= 1)."""


class UnsupportedFamilyError(NrlevyError, ValueError):
    """The requested operation has no exact algorithm for this jump-measure family."""


class ConfigError(NrlevyError, ValueError):
    """A configuration file or CLI flag failed validation."""


class NumericalError(NrlevyError, RuntimeError):
    """A numerical routine (quadrature, factorization, safety cap) failed."""
