"""Exception hierarchy shared by every module."""


class ClextError(Exception):
    """Base class for all errors raised by clext."""


class InvalidParameters(ClextError, ValueError):
    """Parameters outside the admissible domain of an operation."""


class RejectedFamily(InvalidParameters):
    """Deformation whose beta coefficients cannot be made N-independent."""


class UnitarityViolation(ClextError):
    """A squared norm lambda_n (or F(n)) came out negative."""


class TruncationTooSmall(ClextError):
    """Matrix dimension too small for a truncation-safe check."""


class NotApplicable(ClextError):
    """Construction exists only for a parameter pattern that is not met."""
