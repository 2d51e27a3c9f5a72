"""Exceptions raised by the core term and workflow model."""

from typing import Optional


class TermError(Exception):
    """Base exception for term and formula errors."""
    pass


class UnificationError(TermError):
    """Two terms that were required to unify do not."""

    def __init__(self, left, right):
        self.left = left
        self.right = right
        super().__init__(f"Cannot unify {left} with {right}")


class TermSyntaxError(TermError):
    """Text could not be parsed as a term, formula, operation or constraint."""

    def __init__(self, message: str, text: str = "", position: Optional[int] = None):
        self.text = text
        self.position = position
        detail = message
        if position is not None:
            detail = f"{message} at position {position} in {text!r}"
        super().__init__(detail)


class WorkflowError(Exception):
    """A workflow violates one of its invariants."""
    pass


class NonGroundPostcondition(TermError):
    """A postcondition still contains unbound schema variables when applied."""

    def __init__(self, formula, variables):
        self.formula = formula
        self.variables = sorted(variables)
        super().__init__(
            f"Postcondition {formula} has unbound variables: {', '.join(self.variables)}"
        )
