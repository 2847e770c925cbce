"""Exception types shared across the library."""


class BlowwaveError(Exception):
    """Base class for all library errors."""


class DomainError(BlowwaveError):
    """A parameter or argument violates a stated precondition."""


class ConstructionError(BlowwaveError):
    """A wave-profile construction failed its continuity or sign checks."""


class ContinuationError(BlowwaveError):
    """Newton polishing diverged along a homotopy path.

    ``last_good_r1`` holds the largest delay for which the root was still
    certified.
    """

    def __init__(self, message, last_good_r1=None):
        super().__init__(message)
        self.last_good_r1 = last_good_r1


class AmbiguityError(BlowwaveError):
    """Two continued root paths came too close to tell apart."""


class BoundaryProximityError(BlowwaveError):
    """A root lies too close to a counting rectangle's boundary."""


class ContourSingularityError(BlowwaveError):
    """The kernel denominator (nearly) vanishes at a quadrature node."""


class KernelQualityError(BlowwaveError):
    """A kernel table failed its decay or realness certificate."""


class NumericsError(BlowwaveError):
    """A computation produced a non-finite value."""


class ConfigError(BlowwaveError):
    """A configuration file or object is invalid or mismatched."""


class DivergenceError(BlowwaveError):
    """The fixed-point iteration shows sustained growth of its updates."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
