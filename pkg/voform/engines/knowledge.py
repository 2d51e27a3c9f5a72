"""
Agent knowledge bases and formula evaluation.

A knowledge base is an ordered, duplicate-free tuple of atoms. Atoms may
contain variables; such schematic facts match any instance. Negation is
negation as failure.
"""

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Tuple

from voform.core.errors import NonGroundPostcondition
from voform.core.formulas import And, Atom, Formula, Not, TrueFormula, all_atoms
from voform.core.terms import EMPTY, Substitution, unify


@dataclass(frozen=True)
class KnowledgeBase:
    atoms: Tuple[Atom, ...] = ()

    def __post_init__(self):
        unique = []
        for atom in self.atoms:
            if not isinstance(atom, Atom):
                raise TypeError(f"Knowledge bases hold atoms, not {atom!r}")
            if atom not in unique:
                unique.append(atom)
        object.__setattr__(self, 'atoms', tuple(unique))

    def __iter__(self) -> Iterator[Atom]:
        return iter(self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    def __contains__(self, atom: object) -> bool:
        return atom in self.atoms

    def asserted(self, atom: Atom) -> 'KnowledgeBase':
        if atom in self.atoms:
            return self
        return KnowledgeBase(self.atoms + (atom,))

    def retracted(self, atom: Atom) -> 'KnowledgeBase':
        """Drop every atom that unifies with ``atom``."""
        return KnowledgeBase(tuple(a for a in self.atoms if unify(atom, a) is None))

    def variables(self) -> Iterator:
        for atom in self.atoms:
            yield from atom.variables()

    def __str__(self) -> str:
        return '{' + ', '.join(str(a) for a in self.atoms) + '}'


def solutions(kb: KnowledgeBase, formula: Formula, subst: Substitution = EMPTY) -> Iterator[Substitution]:
    """Every substitution extending ``subst`` under which ``formula`` holds, in KB order."""
    if isinstance(formula, TrueFormula):
        yield subst
    elif isinstance(formula, Atom):
        for fact in kb.atoms:
            result = unify(formula, fact, subst)
            if result is not None:
                yield result
    elif isinstance(formula, And):
        for partial in solutions(kb, formula.left, subst):
            yield from solutions(kb, formula.right, partial)
    elif isinstance(formula, Not):
        if next(solutions(kb, formula.operand, subst), None) is None:
            yield subst
    else:
        raise TypeError(f"Not a formula: {formula!r}")


def evaluate(kb: KnowledgeBase, formula: Formula, subst: Substitution = EMPTY) -> Optional[Substitution]:
    """
    Decide ``formula`` against ``kb``.

    Returns:
        The first extension of ``subst`` that makes the formula hold, or
        None when it does not hold
    """
    return next(solutions(kb, formula, subst), None)


def apply_postcondition(
    kb: KnowledgeBase,
    formula: Formula,
    subst: Substitution,
    open_variables: Iterable[str] = (),
) -> KnowledgeBase:
    """
    Update ``kb`` with the effects of an instantiated postcondition.

    Positive atoms are asserted and atoms under a negation are retracted,
    left to right. Variables named in ``open_variables`` stand for still
    unspecified parameters and may stay unbound; the asserted atoms are
    then schemata.

    Raises:
        NonGroundPostcondition: If any other variable of ``formula`` is left unbound
    """
    allowed = set(open_variables)
    unbound = {
        v.name for v in formula.variables()
        if v.is_anonymous or (subst.walk(v) == v and v.name not in allowed)
    }
    if unbound:
        raise NonGroundPostcondition(formula, unbound)

    return _apply(kb, formula, subst)


def _apply(kb: KnowledgeBase, formula: Formula, subst: Substitution) -> KnowledgeBase:
    if isinstance(formula, Atom):
        return kb.asserted(subst.resolve(formula))
    if isinstance(formula, And):
        return _apply(_apply(kb, formula.left, subst), formula.right, subst)
    if isinstance(formula, Not):
        for atom in all_atoms(formula.operand):
            kb = kb.retracted(subst.resolve(atom))
        return kb
    return kb
