"""
Constraint annotations over workflow variables.

Two constraint forms exist: closed numeric intervals (``Res in [900,1100]``)
and finite sets of constants (``ST in {radar,optical}``).
"""

from dataclasses import dataclass
from decimal import Decimal
from typing import Dict, FrozenSet, Iterable, Iterator, Optional, Tuple, Union

from voform.core.errors import TermError
from voform.core.terms import EMPTY, Constant, Substitution, Variable


@dataclass(frozen=True)
class IntervalMembership:
    """``variable in [lower, upper]`` (closed)."""

    variable: Variable
    lower: Decimal
    upper: Decimal

    def __post_init__(self):
        if self.variable.is_anonymous:
            raise TermError("Constraints cannot mention the anonymous variable")
        object.__setattr__(self, 'lower', Decimal(str(self.lower)))
        object.__setattr__(self, 'upper', Decimal(str(self.upper)))

    def with_variable(self, variable: Variable) -> 'IntervalMembership':
        return IntervalMembership(variable, self.lower, self.upper)

    def admits(self, value: Constant) -> bool:
        return value.is_number and self.lower <= value.value <= self.upper

    def __str__(self) -> str:
        return f"{self.variable} in [{self.lower},{self.upper}]"


@dataclass(frozen=True)
class SetMembership:
    """``variable in {c1, ..., cn}``."""

    variable: Variable
    values: FrozenSet[Constant]

    def __post_init__(self):
        if self.variable.is_anonymous:
            raise TermError("Constraints cannot mention the anonymous variable")
        values = frozenset(self.values)
        if not all(isinstance(v, Constant) for v in values):
            raise TermError("Set constraints may only contain constants")
        object.__setattr__(self, 'values', values)

    def with_variable(self, variable: Variable) -> 'SetMembership':
        return SetMembership(variable, self.values)

    def admits(self, value: Constant) -> bool:
        return value in self.values

    def sorted_values(self) -> Tuple[Constant, ...]:
        return tuple(sorted(self.values, key=str))

    def __str__(self) -> str:
        return f"{self.variable} in {{" + ','.join(str(v) for v in self.sorted_values()) + '}'


Constraint = Union[IntervalMembership, SetMembership]


class _Domain:
    """Intersection of the constraints that apply to one variable."""

    def __init__(self):
        self.lower: Optional[Decimal] = None
        self.upper: Optional[Decimal] = None
        self.values: Optional[FrozenSet[Constant]] = None

    def add(self, constraint: Constraint) -> None:
        if isinstance(constraint, IntervalMembership):
            self.lower = constraint.lower if self.lower is None else max(self.lower, constraint.lower)
            self.upper = constraint.upper if self.upper is None else min(self.upper, constraint.upper)
        else:
            self.values = constraint.values if self.values is None else self.values & constraint.values

    def is_empty(self) -> bool:
        has_interval = self.lower is not None
        if has_interval and self.lower > self.upper:
            return True
        if self.values is None:
            return False
        if not has_interval:
            return not self.values
        return not any(
            v.is_number and self.lower <= v.value <= self.upper for v in self.values
        )


def constraint_satisfiable(
    constraints: Iterable[Constraint],
    partial: Substitution = EMPTY,
) -> bool:
    """
    Decide whether some assignment extending ``partial`` satisfies every constraint.

    Variables bound to constants are checked directly. Variables bound to
    other variables pool their domains with that variable. A variable
    bound to any other structured term can never satisfy a constraint.
    """
    domains: Dict[str, _Domain] = {}
    for constraint in constraints:
        target = partial.resolve(constraint.variable)
        if isinstance(target, Variable):
            if target.is_anonymous:
                return False
            domains.setdefault(target.name, _Domain()).add(constraint)
        elif isinstance(target, Constant):
            if not constraint.admits(target):
                return False
        else:
            return False
    return not any(domain.is_empty() for domain in domains.values())


@dataclass(frozen=True)
class ConstraintAnnotation:
    """An ordered, duplicate-free collection of constraints."""

    constraints: Tuple[Constraint, ...] = ()

    def __post_init__(self):
        unique = []
        for constraint in self.constraints:
            if constraint not in unique:
                unique.append(constraint)
        object.__setattr__(self, 'constraints', tuple(unique))

    def __iter__(self) -> Iterator[Constraint]:
        return iter(self.constraints)

    def __len__(self) -> int:
        return len(self.constraints)

    def __bool__(self) -> bool:
        return bool(self.constraints)

    @property
    def is_empty(self) -> bool:
        return not self.constraints

    def variable_names(self):
        return {c.variable.name for c in self.constraints}

    def satisfiable(self, partial: Substitution = EMPTY) -> bool:
        return constraint_satisfiable(self.constraints, partial)

    def restrict(self, subst: Substitution) -> 'ConstraintAnnotation':
        """
        Re-express the annotation after applying ``subst``.

        Constraints on variables now bound to constants are discharged;
        constraints on variables renamed to other variables follow the
        rename. Callers must have checked satisfiability first.
        """
        kept = []
        for constraint in self.constraints:
            target = subst.resolve(constraint.variable)
            if isinstance(target, Variable):
                kept.append(constraint.with_variable(target))
            elif isinstance(target, Constant):
                if not constraint.admits(target):
                    raise TermError(f"Constraint {constraint} violated by {target}")
            else:
                raise TermError(f"Constraint {constraint} cannot hold for {target}")
        return ConstraintAnnotation(tuple(kept))

    def __str__(self) -> str:
        return ', '.join(str(c) for c in self.constraints)
