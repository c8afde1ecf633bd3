"""Exception hierarchy shared by all relosc modules."""


class ReloscError(Exception):
    """Base class for all errors raised by this package."""


class OutOfDomain(ReloscError):
    """Evaluation point lies outside the validity domain of a coefficient family."""


class NonPositiveCoefficient(ReloscError):
    """A descriptor yields p <= 0 or r <= 0 somewhere."""


class StepUnderflow(ReloscError):
    """The adaptive step controller cannot meet the requested tolerance."""


class SingularLeftEndpoint(ReloscError):
    """Left-boundary solutions require a regular left endpoint."""


class AboveEssentialSpectrum(ReloscError):
    """No exponentially decaying direction on the tail at this spectral parameter."""


class NotCovered(ReloscError):
    """Requested abscissa is not covered by the trajectory."""


class FactorizationBreakdown(ReloscError):
    """Triangular factorization of the discretized operator failed even after jitter."""


class NotConverged(ReloscError):
    """A grid-doubling (Richardson) check changed the reported integer."""


class NotStabilized(ReloscError):
    """An expanding-interval or truncation-doubling quantity failed to settle."""


class NotInGap(ReloscError):
    """Spectral parameter sits on (or too close to) the spectrum of one operator."""


class MixedSign(ReloscError):
    """Interpolation legs require a coefficient difference of definite sign."""


class CollapsedGap(ReloscError):
    """The discriminant is tangent to +-2: the gap is closed and kappa is infinite."""


class ScanTooCoarse(ReloscError):
    """A scan cell still brackets more than one sign change after refinement."""
