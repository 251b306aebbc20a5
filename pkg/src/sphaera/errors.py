"""Exception types raised by the geometry layers."""


class SphaeraError(Exception):
    """Base class for all library errors."""


class DegenerateLune(SphaeraError):
    """Hemisphere pair is equal or opposite; no lune exists."""


class BadConfiguration(SphaeraError):
    """A (hemisphere, point, point) configuration violates its preconditions."""


class NoHemisphere(SphaeraError):
    """Point set admits no open hemisphere containing all of it."""


class Degenerate(SphaeraError):
    """Construction collapsed below full dimension (hull with < 3 vertices, ...)."""


class NotOnBoundary(SphaeraError):
    """Queried point does not lie on the body boundary within tolerance."""


class NotSupporting(SphaeraError):
    """H(k) does not support the body (k is interior or exterior to the polar)."""


class EmptyInterior(SphaeraError):
    """Body has empty interior; polar duality is undefined for it."""


class NotConstantDiameter(SphaeraError):
    """Operation requires a body that passes the constant-diameter check."""


class NotOnPolarBoundary(SphaeraError):
    """Point is not on the polar boundary within tolerance."""


class NoSolution(SphaeraError):
    """A scalar equation (circumradius, intersection, ...) has no admissible root."""


class PrecondViolation(SphaeraError):
    """Constructor input violates a documented precondition."""


class GenerationFailed(SphaeraError):
    """Randomized generation exhausted its retry budget."""

    def __init__(self, message, attempts=None):
        super().__init__(message)
        self.attempts = attempts or []


class InvalidBodyFile(SphaeraError):
    """Body file violates the schema or a geometric invariant.

    The message names the failed invariant.
    """
