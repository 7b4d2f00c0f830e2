class StokesError(Exception):
    """Base exception for periodic-stokes errors."""

    pass


class GridError(StokesError, ValueError):
    """Invalid grid parameters, or an array or field that does not match its grid."""

    pass


class NonHermitianError(StokesError):
    """Spectral coefficients that do not represent a real-valued field."""

    pass


class NormError(StokesError):
    """A norm requested outside the domain on which it is defined."""

    pass


class SymbolDomainError(StokesError):
    """A multiplier symbol evaluated at an excluded frequency."""

    pass


class SymbolAuditError(StokesError):
    """Non-finite value met while auditing a symbol."""

    pass


class PreconditionError(StokesError):
    """Data that violate the preconditions of a solver stage."""

    pass


class CompatibilityError(PreconditionError):
    """Discrete compatibility violated at one or more time frequencies."""

    def __init__(self, message: str, frequencies: list[int] | None = None):
        super().__init__(message)
        self.frequencies = list(frequencies or [])


class OracleError(StokesError):
    """The finite-difference oracle could not produce a trustworthy solution."""

    pass


class ManufacturedError(StokesError):
    """Unknown manufactured recipe, or a recipe that does not decay inside the box."""

    pass


class EstimateError(StokesError):
    """Inconsistent norms met while estimating a regularity constant."""

    pass


class ConfigError(StokesError):
    """Invalid run configuration."""

    pass
