"""Exception hierarchy shared across the package."""


class VargammaError(Exception):
    """Base class for all package errors."""


class InvalidParameter(VargammaError):
    """A parameter violates its positivity/domain invariant."""


class NonConvergence(VargammaError):
    """An iterative routine exhausted its budget before reaching tolerance."""


class InvalidBracket(VargammaError):
    """Root-finding bracket endpoints do not have opposite signs."""


class MgfDomain(VargammaError):
    """Moment generating function evaluated outside its domain."""


class DegenerateSample(VargammaError):
    """Sample is constant: the scale estimate would be zero."""


class OptimizationFailed(VargammaError):
    """Numerical optimizer failed to produce a usable optimum."""


class InvalidNesting(VargammaError):
    """Likelihood-ratio statistic is negative beyond numerical tolerance."""


class NoSolution(VargammaError):
    """No martingale tilt exists for the given parameters."""


class InsufficientQuotes(VargammaError):
    """Too few option quotes for a calibration."""


class ParseError(VargammaError):
    """Malformed input file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NonPositivePrice(ParseError):
    """Price column contains a non-positive value."""


class NonMonotoneDates(ParseError):
    """Date column is not strictly increasing."""
