"""Exception types shared across the package."""


class RankCascadeError(Exception):
    """Base class for all rankcascade errors."""


class InvalidInputError(RankCascadeError, ValueError):
    """A product, catalog, distribution, ranking or parameter violates its contract."""


class TiedScoreError(InvalidInputError):
    """Scores that must be strictly ordered are tied, so the result is indeterminate."""


class BudgetExceededError(RankCascadeError, RuntimeError):
    """An exhaustive-enumeration request exceeds the hard size budget."""
