"""Failure modes shared across the package.

Every error below signals a *certified* refusal: the operation could not
establish its postcondition soundly, and silently returning an approximate
answer would poison downstream certificates.
"""


class PiqLabError(Exception):
    """Base class for all package-specific failures."""


class PrecisionLoss(PiqLabError):
    """A p-adic computation cancelled below working precision."""

    def __init__(self, message: str = "", known_floor=None):
        super().__init__(message or "cancellation below working precision")
        self.known_floor = known_floor  # certified: |value| <= p**(-known_floor)


class TailDominates(PiqLabError):
    """A truncation tail could not be dominated; raise the truncation degree."""


class NoRootInField(PiqLabError):
    """The requested p-adic root does not exist in Q_p."""


class ExtensionRequired(PiqLabError):
    """The construction needs a finite extension of Q_p, which is not modeled."""


class NotDivisible(PiqLabError):
    """Exact division failed (no quotient exists to the requested degree)."""


class InvarianceViolated(PiqLabError):
    """A subscheme claimed invariant is not mapped into itself."""


class BadReduction(PiqLabError):
    """Reduction mod p degenerates (p is not a good prime for the map)."""


class SearchExhausted(PiqLabError):
    """A bounded search ran out of candidates."""


class ConstructionFailed(PiqLabError):
    """An exact construction failed an internal identity check."""


class DenominatorNotUnit(PiqLabError):
    """A local expansion hit a denominator that is not a p-adic unit."""
