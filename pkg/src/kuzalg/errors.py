"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: parse errors exit 2, hypothesis
violations (a required certificate failed) exit 3, internal consistency
failures (two routes to the same number disagree) exit 4.
"""


class KuzalgError(Exception):
    """Base class for all library errors."""


class StructuralError(KuzalgError):
    """Malformed input: wrong exponent length, weight mismatch, inhomogeneous
    polynomial where a homogeneous one is required, and the like."""


class ParseError(KuzalgError):
    """Polynomial / fixture text that does not match the grammar."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class HypothesisViolation(KuzalgError):
    """A hypothesis required by an operation does not hold for the input.

    The main case is a polynomial without an isolated critical point at the
    origin; ``detail`` then names the graded degree of the vanishing window
    where a nonzero class survives.
    """

    def __init__(self, message: str, detail: dict | None = None):
        self.detail = detail or {}
        super().__init__(message)


class InternalConsistencyError(KuzalgError):
    """Two independent computations of the same quantity disagree."""
