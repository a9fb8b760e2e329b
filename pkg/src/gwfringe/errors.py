"""Exception hierarchy shared across the package."""


class GWFringeError(Exception):
    """Base class for all errors raised by this package."""


class NonCritical(GWFringeError):
    """Offspring distribution mean differs from 1 beyond tolerance."""


class ZeroVariance(GWFringeError):
    """Offspring distribution is degenerate at 1 (sigma^2 = 0)."""


class MissingZero(GWFringeError):
    """Offspring distribution has p_0 = 0, so finite trees are impossible."""


class TruncationNeeded(GWFringeError):
    """Exact convolution requested for an unbounded pmf without a closed form."""


class BadSum(GWFringeError):
    """Sequence does not sum to n-1, so no rotation can be a degree sequence."""


class CapExceeded(GWFringeError):
    """Requested exhaustive enumeration beyond the configured size cap."""


class ZeroProbability(GWFringeError):
    """Conditioning event has probability zero (e.g. size incompatible with span)."""


class SpanMismatch(GWFringeError):
    """Tree size n with n != 1 (mod span) cannot occur."""


class RejectionBudgetExceeded(GWFringeError):
    """Rejection sampler exhausted its round budget without an acceptance."""


class Overflow(GWFringeError):
    """A generated tree exceeded its size cap (expected for unconditioned runs)."""


class HeightExceeded(GWFringeError):
    """Tree is taller than the truncation depth it is being evaluated against."""
