"""Shared exception types."""


class UndefinedConditionalError(ValueError):
    """Raised when a conditional probability has zero mass in its condition.

    Post-selected conditionals P(M1 | M2=1, C) are quotients; when the
    post-selection never succeeds the quotient is undefined and callers must
    handle that explicitly rather than receive a silent 0 or NaN.
    """
