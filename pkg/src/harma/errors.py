"""Exception and warning types raised across the package."""


class HarmaError(Exception):
    """Base class for all package errors."""


class UnknownFamilyError(HarmaError, ValueError):
    """Raised for an unrecognised polynomial specialization name."""


class RecurrenceMismatchError(HarmaError, ArithmeticError):
    """Neither third-term sign of the recurrence reproduces the series oracle."""


class DegeneratePolynomialError(HarmaError, ValueError):
    """The leading AR/MA coefficient is zero, so the stated order is wrong."""


class ValidationError(HarmaError, ValueError):
    """The model violates a stationarity, invertibility or range condition."""


class DomainError(HarmaError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class QuadratureError(HarmaError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""


class PrecisionWarning(UserWarning):
    """Floating-point cancellation may have destroyed significant digits."""


class TruncationWarning(UserWarning):
    """A truncated infinite series has a non-negligible estimated tail."""


class NonCausalWarning(UserWarning):
    """The trinomial operator has roots inside the unit disk.

    Its causal power-series coefficients then grow geometrically, so the
    causal MA(infinity) representation does not converge.
    """


class BurnInWarning(UserWarning):
    """The requested burn-in is shorter than the recommended minimum."""
