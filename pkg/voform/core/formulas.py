"""
Formulas: atoms, conjunction, negation and ``true``.

Formulas share the variable traversal protocol of terms, so substitution,
renaming and unification apply to them directly.
"""

from dataclasses import dataclass
from typing import Iterable, Iterator, List, Tuple

from voform.core.errors import TermError
from voform.core.terms import (
    NUMBER_PATTERN,
    SYMBOL_PATTERN,
    Functional,
    Term,
)


class Formula:
    """Base class of every formula."""

    def map_variables(self, fn) -> 'Formula':
        raise NotImplementedError

    def variables(self) -> Iterator:
        raise NotImplementedError

    def substitute(self, subst) -> 'Formula':
        return self.map_variables(subst.resolve)

    def is_ground(self) -> bool:
        return next(iter(self.variables()), None) is None


@dataclass(frozen=True)
class TrueFormula(Formula):

    def map_variables(self, fn):
        return self

    def variables(self):
        return iter(())

    def __str__(self) -> str:
        return 'true'


TRUE = TrueFormula()


@dataclass(frozen=True)
class Atom(Functional, Formula):
    """``predicate(t1,...,tn)``; zero arguments prints as the bare predicate."""

    predicate: str
    args: Tuple[Term, ...] = ()

    kind = 'atom'

    def __post_init__(self):
        if self.predicate == 'true':
            raise TermError("'true' is reserved")
        if not SYMBOL_PATTERN.match(self.predicate) or NUMBER_PATTERN.match(self.predicate):
            raise TermError(f"Invalid predicate: {self.predicate!r}")
        object.__setattr__(self, 'args', tuple(self.args))

    @property
    def functor(self) -> str:
        return self.predicate

    @property
    def arguments(self) -> Tuple[Term, ...]:
        return self.args

    def map_variables(self, fn):
        return Atom(self.predicate, tuple(a.map_variables(fn) for a in self.args))

    def variables(self):
        for arg in self.args:
            yield from arg.variables()

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}(" + ','.join(str(a) for a in self.args) + ')'


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula

    def map_variables(self, fn):
        return Not(self.operand.map_variables(fn))

    def variables(self):
        return self.operand.variables()

    def __str__(self) -> str:
        if isinstance(self.operand, And):
            return f"~({self.operand})"
        return f"~{self.operand}"


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def map_variables(self, fn):
        return And(self.left.map_variables(fn), self.right.map_variables(fn))

    def variables(self):
        yield from self.left.variables()
        yield from self.right.variables()

    def __str__(self) -> str:
        right = str(self.right)
        if isinstance(self.right, And):
            right = f"({right})"
        return f"{self.left} & {right}"


def conjunction(formulas: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; ``true`` for no formulas."""
    result = None
    for formula in formulas:
        result = formula if result is None else And(result, formula)
    return result if result is not None else TRUE


def conjuncts(formula: Formula) -> List[Formula]:
    """Flatten a conjunction into its operands, dropping ``true``."""
    if isinstance(formula, And):
        return conjuncts(formula.left) + conjuncts(formula.right)
    if isinstance(formula, TrueFormula):
        return []
    return [formula]


def positive_atoms(formula: Formula) -> List[Atom]:
    """Atoms that occur outside any negation."""
    if isinstance(formula, Atom):
        return [formula]
    if isinstance(formula, And):
        return positive_atoms(formula.left) + positive_atoms(formula.right)
    return []


def negated_atoms(formula: Formula) -> List[Atom]:
    """Atoms that occur under a negation."""
    if isinstance(formula, Not):
        return all_atoms(formula.operand)
    if isinstance(formula, And):
        return negated_atoms(formula.left) + negated_atoms(formula.right)
    return []


def all_atoms(formula: Formula) -> List[Atom]:
    if isinstance(formula, Atom):
        return [formula]
    if isinstance(formula, Not):
        return all_atoms(formula.operand)
    if isinstance(formula, And):
        return all_atoms(formula.left) + all_atoms(formula.right)
    return []
