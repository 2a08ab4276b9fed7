"""Exception types shared across the package."""


class ConeHeatError(Exception):
    """Base class for all package-specific errors."""


class DomainMembershipError(ConeHeatError):
    """A point lies outside the closure of the domain it was used with."""


class SingularInputError(ConeHeatError):
    """Input sits exactly at a singular point of a map (e.g. projection pole)."""


class ChartDomainError(ConeHeatError):
    """A point falls outside the boundary chart it was evaluated in."""


class PositivityError(ConeHeatError):
    """A quantity that must be strictly positive was evaluated where it vanishes."""


class CapabilityError(ConeHeatError):
    """Requested operation exceeds what the implementation supports."""


class CoverageError(ConeHeatError):
    """A finite index range fails to cover the support it must cover."""


class PreconditionError(ConeHeatError):
    """Stated hypotheses of an inequality or operation are violated."""


class DivergenceError(ConeHeatError):
    """An integral required to be finite diverges for the given exponents."""

    def __init__(self, message: str, endpoint: str | None = None):
        super().__init__(message)
        self.endpoint = endpoint


class NumericalFailure(ConeHeatError):
    """An iterative numerical procedure failed; carries diagnostics."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DataError(ConeHeatError):
    """Field data is malformed (non-finite samples, wrong dtype, ...)."""


class ShapeError(ConeHeatError):
    """Incompatible grids or array shapes."""


class DegenerateInputError(ConeHeatError):
    """An input that makes the requested quantity undefined (e.g. zero denominator)."""


class ConfigError(ConeHeatError):
    """Invalid experiment configuration."""
