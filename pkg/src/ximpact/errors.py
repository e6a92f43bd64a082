"""Exception types shared across the toolkit."""


class XImpactError(Exception):
    """Base class for all toolkit errors."""


class SymmetryViolation(XImpactError):
    """Input matrix is not symmetric within tolerance."""


class NotPSD(XImpactError):
    """Matrix has an eigenvalue below the positive semi-definite tolerance."""


class NotPD(XImpactError):
    """Matrix is not positive definite where strict definiteness is required."""


class BasisError(XImpactError):
    """Column set is not an orthonormal basis of the requested subspace."""


class ShapeError(XImpactError):
    """Operands have incompatible dimensions."""


class DegenerateLiquidity(XImpactError):
    """An asset has zero flow volatility where a positive one is required."""


class ZeroVolatility(XImpactError):
    """An asset has zero price volatility and the model cannot absorb it."""


class PreconditionError(XImpactError):
    """Operation invoked on a model that lacks a required invariance."""


class InvalidWeight(XImpactError):
    """Score weight matrix is zero or otherwise unusable."""


class DegenerateDenominator(XImpactError):
    """Realized-variance denominator of a score is zero."""


class OrderingError(XImpactError):
    """Event stream is not time-ordered."""


class EmptySession(XImpactError):
    """No events fall inside the session window."""


class InsufficientData(XImpactError):
    """Not enough samples or calibration days for the requested estimate."""


class UnknownAsset(XImpactError):
    """Referenced asset is not present in the panel."""


class SchemaError(XImpactError):
    """A file does not conform to its documented schema."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line
