"""Exception types shared across the package.

Argument validation failures raise plain ``ValueError``; the classes below
cover the remaining documented failure modes.
"""


class KspinError(Exception):
    """Base class for package-specific errors."""


class ResourceError(KspinError):
    """A requested computation exceeds the configured memory/size budget."""


class NumericError(KspinError):
    """A numerical procedure failed (no root, non-convergence, bad fit)."""


class DataError(KspinError):
    """Input data violates an assumption of a statistic (e.g. degeneracies)."""
