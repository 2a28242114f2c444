"""Shared exception types."""


class DimensionMismatch(ValueError):
    """Operands live in different ambient dimensions."""


class BudgetExceeded(RuntimeError):
    """An enumeration would exceed its configured operation budget."""


class PrecisionExhausted(RuntimeError):
    """A certified comparison could not be decided within the precision cap.

    Raised instead of guessing; callers treat it as "undecided", never as
    "holds" or "fails".
    """


class ParseError(ValueError):
    """Malformed point-set input."""
