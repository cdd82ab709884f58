"""Exception types shared across the package."""


class EpraKitError(Exception):
    """Base class for all errors raised by this package."""


class RankDeficient(EpraKitError):
    """Kernel matrix is rank deficient within the requested tolerance."""


class DimensionMismatch(EpraKitError):
    """Operands have incompatible shapes."""


class EmptySupport(EpraKitError):
    """Away-step vertex requested for a vector with no positive component."""


class NoImprovingVertex(EpraKitError):
    """No simplex vertex with nonpositive inner product exists although the
    stop conditions failed; impossible in exact arithmetic."""


class DegenerateStep(EpraKitError):
    """Line-search denominator vanished while the stop conditions failed."""


class AwayCapSingular(EpraKitError):
    """Away step requested from a simplex vertex (cap denominator is zero)."""


class FullRankSquare(EpraKitError):
    """Matrix has a trivial kernel; no nullspace basis exists."""


class ZeroVector(EpraKitError):
    """A nonzero vector was required."""


class NoFeasibleStart(EpraKitError):
    """No strictly positive kernel point was found after seeded restarts."""


class DegenerateMax(EpraKitError):
    """Generated interior point has a tied maximal entry after bounded retries."""


class BothSidesInterior(EpraKitError):
    """Both the primal and the dual basic procedure produced interior
    certificates in the same round, which Gordan's theorem forbids."""
