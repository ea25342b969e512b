"""Exception hierarchy shared by all smclab modules."""


class SmclabError(Exception):
    """Base class for all errors raised by this package."""


class NegativeEntry(SmclabError):
    """A probability vector contains a negative entry."""


class RowSumOutOfTolerance(SmclabError):
    """A probability vector deviates from sum 1 by more than the input tolerance."""


class DimensionMismatch(SmclabError):
    """Alphabet sizes of the operands do not chain."""


class EnumerationCapExceeded(SmclabError):
    """An exhaustive enumeration would exceed the configured cap."""


# The codec and oracle modules use the shorter name for the same condition.
CapExceeded = EnumerationCapExceeded


class NegativeRho(SmclabError):
    """rho must be nonnegative."""


class RhoOutOfRange(SmclabError):
    """rho falls outside the domain of the requested functional."""


class RangeViolation(SmclabError):
    """An argument falls outside its stated range."""


class ConvergenceFailure(SmclabError):
    """An iterative optimizer exhausted its iteration budget."""


class NotPrime(SmclabError):
    """The field order q is not a prime number."""


class ZeroVector(SmclabError):
    """A nonzero field vector is required."""


class IndexOutOfRange(SmclabError):
    """A message index exceeds its alphabet."""


class Infeasible(SmclabError):
    """No nonzero message layout meets the leakage targets."""
