"""Semantic exception hierarchy.

Every failure mode raised by this package derives from :class:`AllocError`,
so callers can catch one base class. The CLI maps subfamilies to exit codes.
"""


class AllocError(Exception):
    """Base class for all errors raised by impalloc."""


# ----- input validation (distributions, configs, weights) -------------------

class EmptyDistribution(AllocError):
    """A class distribution needs at least one class."""


class NonPositiveProbability(AllocError):
    """Every class probability must be strictly positive."""


class NotNormalized(AllocError):
    """Class probabilities must sum to one within 1e-9."""


class RadixTooSmall(AllocError):
    """The digit radix must be an integer >= 2."""


class NegativeBudget(AllocError):
    """The storage budget must be nonnegative."""


class KindLengthMismatch(AllocError):
    """System kind and original-length layout do not agree."""


class ConfigError(AllocError):
    """A config document failed to parse; the message names the field."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"config field '{field}': {message}")


# ----- distortion / plans ----------------------------------------------------

class OutOfRange(AllocError):
    """A compressed length fell outside [0, original length]."""


class InfeasiblePlan(AllocError):
    """An allocation plan violates its length bounds or budget."""


class InteriorConditionViolated(AllocError):
    """A closed form was requested outside its all-interior regime."""


class PreconditionBudgetTooSmall(AllocError):
    """The budget is below the regime floor required by a closed form."""


class DeltaOutOfRange(AllocError):
    """The requested error cap lies outside the admissible bounds."""


class TargetUnreachable(AllocError):
    """The requested error target is inconsistent with its precondition."""


# ----- solver -----------------------------------------------------------------

class BudgetExceedsCapacity(AllocError):
    """The budget exceeds the expected total original storage."""


class NoConvergence(AllocError):
    """Water-level bisection could not meet the budget tolerance."""


# ----- oracles ----------------------------------------------------------------

class SearchSpaceTooLarge(AllocError):
    """Exhaustive enumeration would exceed the guarded instance size."""


class NoInteriorClass(AllocError):
    """Multiplier recovery needs at least one strictly interior class."""
