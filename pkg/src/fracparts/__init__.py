"""Fractional parts of b**n mod n over n = pq, p > b**q: construction,
exact discrepancies and executable checks of the supporting inequalities."""

__version__ = "0.1.0"


class VerificationError(AssertionError):
    """A guaranteed inequality failed on computed data."""
