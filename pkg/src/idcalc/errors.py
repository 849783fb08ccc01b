"""Exception types shared across the package."""


class IdcalcError(Exception):
    """Base class for all idcalc errors."""


class ValidationError(IdcalcError):
    """A measure, triplet, or configuration violates its invariants."""


class QuadratureError(IdcalcError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, achieved=None, requested=None):
        super().__init__(message)
        self.achieved = achieved
        self.requested = requested


class DomainError(IdcalcError):
    """The input measure lies outside the domain of the requested mapping."""
