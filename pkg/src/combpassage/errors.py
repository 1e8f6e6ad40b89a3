"""Exception types for the combpassage package."""


class CombPassageError(Exception):
    """Base class for all package errors."""


class OrderOutOfRange(CombPassageError):
    """Bessel order outside the supported |n| <= 512 range."""


class ArgumentOutOfRange(CombPassageError):
    """Bessel argument outside the supported 0 <= a <= 64 range."""


class TruncationInsufficient(CombPassageError):
    """Requested Bessel-sum threshold not reachable within order 512."""


class ShapeMismatch(CombPassageError):
    """Operands have inconsistent matrix dimensions."""


class StepSizeUnderflow(CombPassageError):
    """Adaptive integrator step size collapsed (stiffness or bad tolerances)."""


class InvariantViolation(CombPassageError):
    """A physical invariant (trace, Hermiticity, population bounds) failed."""


class TrackingAmbiguous(CombPassageError):
    """Eigenvector continuity tracking could not disambiguate branches."""


class ConfigError(CombPassageError):
    """Base class for configuration errors."""


class ParseError(ConfigError):
    """Config text does not parse; carries line/column position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ValidationError(ConfigError):
    """A config field violates an invariant; carries the field name."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class UnknownPreset(ConfigError):
    """Preset name not found in the registry."""
