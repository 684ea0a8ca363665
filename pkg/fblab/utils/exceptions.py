"""Custom exceptions for fblab."""
from typing import Optional


class FBLabException(Exception):
    """Base exception for fblab."""

    pass


class ConfigurationError(FBLabException):
    """Raised when configuration is invalid."""

    pass


class DomainError(FBLabException):
    """Raised when an argument is outside the mathematical domain."""

    pass


class CertificationFailure(FBLabException):
    """Raised when a numerical result cannot be certified."""

    pass


class ZeroCertificationError(CertificationFailure):
    """Raised when a Bessel zero cannot be enclosed in a sign-change bracket."""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


class PoleProximityError(FBLabException):
    """Raised when a ratio function is requested too close to one of its poles."""

    def __init__(self, message: str, pole_index: int, distance: float):
        super().__init__(message)
        self.pole_index = pole_index
        self.distance = distance


class QuadratureError(FBLabException):
    """Raised when an integrand is not finite at a quadrature node."""

    def __init__(self, message: str, node: Optional[float] = None):
        super().__init__(message)
        self.node = node


class QuadratureValidationError(CertificationFailure):
    """Raised when a quadrature rule fails its self-convergence check."""

    def __init__(self, message: str, achieved_error: float):
        super().__init__(message)
        self.achieved_error = achieved_error


class UnsupportedCombinationError(FBLabException):
    """Raised when a setting does not support the requested operation."""

    pass


class TruncationError(FBLabException):
    """Raised when an eigenfunction series cannot meet its tolerance."""

    def __init__(self, message: str, required_truncation: Optional[int] = None):
        super().__init__(message)
        self.required_truncation = required_truncation


class DimensionMismatchError(FBLabException):
    """Raised when multi-dimensional inputs disagree in dimension."""

    pass


class AccuracyLossWarning(UserWarning):
    """Issued when a Bessel evaluation leaves the documented accuracy envelope."""

    pass
