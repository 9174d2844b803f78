"""Exception taxonomy.

Two branches: ``ValidationError`` for bad inputs or domain violations (CLI exit
code 1) and ``NumericalError`` for solver breakdowns (CLI exit code 2).
"""

from __future__ import annotations


class ContestForgeError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(ContestForgeError):
    """Inputs violate a documented precondition."""


class NumericalError(ContestForgeError):
    """A solver failed to meet its contract."""


# --- validation ---------------------------------------------------------


class NotMonotone(ValidationError):
    """Prize values increase somewhere they must not."""

    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"prize values not non-increasing at index {index}")


class NegativePrize(ValidationError):
    pass


class BudgetExceeded(ValidationError):
    pass


class IndexOutOfRange(ValidationError):
    pass


class NegativeWeight(ValidationError):
    pass


class BudgetNotExhausted(ValidationError):
    pass


class NoLowCostMass(ValidationError):
    pass


class PopulationTooLarge(ValidationError):
    pass


class InvalidCost(ValidationError):
    pass


class OutOfRange(ValidationError):
    pass


class ProfileNotSubEquilibrium(ValidationError):
    pass


class BudgetTooSmall(ValidationError):
    pass


# --- numerical ----------------------------------------------------------


class NonFinite(NumericalError):
    pass


class IterationLimit(NumericalError):
    pass


class BracketFailure(NumericalError):
    pass


class OrderingViolation(NumericalError):
    pass


class NotSubEquilibrium(NumericalError):
    """A profile that provably should satisfy interim rationality does not.

    Raised loudly instead of being repaired: it would falsify the theory this
    package implements, so the caller must see it.
    """
