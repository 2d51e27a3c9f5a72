"""
First-order terms, substitutions and unification.

Terms are immutable. A compound with exactly two arguments is a
``ServiceTerm`` (name, input, output). Numbers are stored as ``Decimal``
so that ``38.0`` prints back as ``38.0``.
"""

import re
from dataclasses import dataclass
from decimal import Decimal
from enum import Enum
from typing import Callable, Dict, Iterable, Iterator, Mapping, Optional, Set, Tuple, Union

from voform.core.errors import TermError, UnificationError


NUMBER_PATTERN = re.compile(r'^-?\d+(\.\d+)?$')
SYMBOL_PATTERN = re.compile(r'^[a-z0-9][A-Za-z0-9_.]*$')
VARIABLE_PATTERN = re.compile(r'^[A-Z_][A-Za-z0-9_]*$')

ANONYMOUS = '_'


class Term:
    """Base class of every term."""

    def map_variables(self, fn: Callable[['Variable'], 'Term']) -> 'Term':
        raise NotImplementedError

    def variables(self) -> Iterator['Variable']:
        raise NotImplementedError

    def substitute(self, subst: 'Substitution') -> 'Term':
        return self.map_variables(subst.resolve)

    def is_ground(self) -> bool:
        return next(iter(self.variables()), None) is None


@dataclass(frozen=True)
class Constant(Term):
    """A symbol or a number."""

    value: Union[str, Decimal]

    def __post_init__(self):
        value = self.value
        if isinstance(value, bool):
            raise TermError(f"Not a constant: {value!r}")
        if isinstance(value, (int, float)):
            value = Decimal(str(value))
        elif isinstance(value, str):
            if NUMBER_PATTERN.match(value):
                value = Decimal(value)
            elif not SYMBOL_PATTERN.match(value):
                raise TermError(f"Invalid constant symbol: {value!r}")
        elif not isinstance(value, Decimal):
            raise TermError(f"Not a constant: {value!r}")
        object.__setattr__(self, 'value', value)

    @property
    def is_number(self) -> bool:
        return isinstance(self.value, Decimal)

    def map_variables(self, fn):
        return self

    def variables(self):
        return iter(())

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class Variable(Term):
    """A logic variable. ``_`` is anonymous and never bound."""

    name: str

    def __post_init__(self):
        if not VARIABLE_PATTERN.match(self.name):
            raise TermError(f"Invalid variable name: {self.name!r}")

    @property
    def is_anonymous(self) -> bool:
        return self.name == ANONYMOUS

    def map_variables(self, fn):
        return fn(self)

    def variables(self):
        yield self

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class ListTerm(Term):
    elements: Tuple[Term, ...] = ()

    def map_variables(self, fn):
        return ListTerm(tuple(e.map_variables(fn) for e in self.elements))

    def variables(self):
        for element in self.elements:
            yield from element.variables()

    def __str__(self) -> str:
        return '[' + ','.join(str(e) for e in self.elements) + ']'


class Functional:
    """Mixin for anything with a functor and positional arguments."""

    kind = 'term'

    @property
    def functor(self) -> str:
        raise NotImplementedError

    @property
    def arguments(self) -> Tuple[Term, ...]:
        raise NotImplementedError


@dataclass(frozen=True)
class Compound(Functional, Term):
    """``f(t1,...,tn)`` for any arity other than two."""

    name: str
    args: Tuple[Term, ...]

    def __post_init__(self):
        if not SYMBOL_PATTERN.match(self.name) or NUMBER_PATTERN.match(self.name):
            raise TermError(f"Invalid functor: {self.name!r}")
        if len(self.args) == 2:
            raise TermError("Binary compounds must be built as ServiceTerm")

    @property
    def functor(self) -> str:
        return self.name

    @property
    def arguments(self) -> Tuple[Term, ...]:
        return self.args

    def map_variables(self, fn):
        return Compound(self.name, tuple(a.map_variables(fn) for a in self.args))

    def variables(self):
        for arg in self.args:
            yield from arg.variables()

    def __str__(self) -> str:
        if not self.args:
            return f"{self.name}()"
        return f"{self.name}(" + ','.join(str(a) for a in self.args) + ')'


class InstantiationLevel(Enum):
    ABSTRACT = "abstract"
    PARTIAL = "partially_instantiated"
    CONCRETE = "concrete"


@dataclass(frozen=True)
class ServiceTerm(Functional, Term):
    """A web service ``name(input, output)``."""

    name: str
    input: Term
    output: Term

    def __post_init__(self):
        if not SYMBOL_PATTERN.match(self.name) or NUMBER_PATTERN.match(self.name):
            raise TermError(f"Invalid service name: {self.name!r}")

    @property
    def functor(self) -> str:
        return self.name

    @property
    def arguments(self) -> Tuple[Term, ...]:
        return (self.input, self.output)

    def map_variables(self, fn):
        return ServiceTerm(self.name, self.input.map_variables(fn), self.output.map_variables(fn))

    def variables(self):
        yield from self.input.variables()
        yield from self.output.variables()

    @property
    def level(self) -> InstantiationLevel:
        return instantiation_level(self)

    def __str__(self) -> str:
        return f"{self.name}({self.input},{self.output})"


def compound(name: str, args: Iterable[Term]) -> Term:
    """Build a compound term, choosing ``ServiceTerm`` for arity two."""
    args = tuple(args)
    if len(args) == 2:
        return ServiceTerm(name, args[0], args[1])
    return Compound(name, args)


def _all_unbound_variables(term: Term) -> bool:
    if isinstance(term, Variable):
        return True
    if isinstance(term, ListTerm):
        return all(isinstance(e, Variable) for e in term.elements)
    return False


def instantiation_level(service: ServiceTerm) -> InstantiationLevel:
    """
    Classify a service term.

    Concrete when both input and output are ground; abstract when each is
    an unbound variable or a list of unbound variables; partial otherwise.
    """
    if service.is_ground():
        return InstantiationLevel.CONCRETE
    if _all_unbound_variables(service.input) and _all_unbound_variables(service.output):
        return InstantiationLevel.ABSTRACT
    return InstantiationLevel.PARTIAL


class Substitution:
    """
    Immutable mapping from variable names to terms.

    Bindings may chain (``X -> Y``, ``Y -> a``); ``resolve`` follows them.
    Cyclic bindings (``X -> [X]``, ``X -> Y, Y -> X``) raise TermError.
    """

    __slots__ = ('_bindings',)

    def __init__(self, bindings: Optional[Mapping[str, Term]] = None):
        self._bindings: Dict[str, Term] = dict(bindings or {})
        for name in self._bindings:
            if name == ANONYMOUS:
                raise TermError("The anonymous variable cannot be bound")
        for name, term in self._bindings.items():
            if _reaches(name, term, self._bindings):
                raise TermError(f"Binding {name} to {term} is cyclic")

    def __contains__(self, name: object) -> bool:
        if isinstance(name, Variable):
            name = name.name
        return name in self._bindings

    def __len__(self) -> int:
        return len(self._bindings)

    def __iter__(self) -> Iterator[str]:
        return iter(self._bindings)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Substitution):
            return NotImplemented
        return self.normalized()._bindings == other.normalized()._bindings

    def __hash__(self) -> int:
        return hash(tuple(sorted((k, str(v)) for k, v in self.normalized()._bindings.items())))

    def __repr__(self) -> str:
        return f"Substitution({self})"

    def __str__(self) -> str:
        inner = ', '.join(f"{name}->{term}" for name, term in sorted(self._bindings.items()))
        return '{' + inner + '}'

    def items(self) -> Iterator[Tuple[str, Term]]:
        return iter(self._bindings.items())

    def get(self, name: str) -> Optional[Term]:
        return self._bindings.get(name)

    def walk(self, term: Term) -> Term:
        """Follow variable bindings until an unbound variable or non-variable."""
        while isinstance(term, Variable) and term.name in self._bindings:
            term = self._bindings[term.name]
        return term

    def resolve(self, term: Term) -> Term:
        """Apply the substitution fully (idempotent result)."""
        term = self.walk(term)
        if isinstance(term, Variable):
            return term
        return term.map_variables(self.resolve)

    def bind(self, variable: Variable, term: Term) -> 'Substitution':
        if variable.is_anonymous:
            return self
        if _occurs(variable.name, term, self._bindings):
            raise TermError(f"Binding {variable} to {term} would be cyclic")
        bindings = dict(self._bindings)
        bindings[variable.name] = term
        result = Substitution.__new__(Substitution)
        result._bindings = bindings
        return result

    def normalized(self) -> 'Substitution':
        """Return an equivalent substitution whose values are fully resolved."""
        resolved = {}
        for name in self._bindings:
            value = self.resolve(Variable(name))
            if value != Variable(name):
                resolved[name] = value
        result = Substitution.__new__(Substitution)
        result._bindings = resolved
        return result

    def restricted(self, names: Iterable[str]) -> 'Substitution':
        """Resolved bindings for the given variable names only."""
        kept = {}
        for name in names:
            if name == ANONYMOUS:
                continue
            value = self.resolve(Variable(name))
            if value != Variable(name):
                kept[name] = value
        return Substitution(kept)

    def to_dict(self) -> Dict[str, str]:
        return {name: str(term) for name, term in sorted(self.normalized().items())}


EMPTY = Substitution()


def apply_substitution(target, subst: Substitution):
    """Apply ``subst`` to a term, service or formula."""
    return target.substitute(subst)


def _reaches(name: str, term: Term, bindings: Mapping[str, Term]) -> bool:
    """Like _occurs, but safe on bindings that may already be cyclic."""
    stack = [term]
    seen: Set[str] = set()
    while stack:
        current = stack.pop()
        if isinstance(current, Variable):
            if current.name == name:
                return True
            if current.name in bindings and current.name not in seen:
                seen.add(current.name)
                stack.append(bindings[current.name])
        elif isinstance(current, ListTerm):
            stack.extend(current.elements)
        elif isinstance(current, Functional):
            stack.extend(current.arguments)
    return False


def _occurs(name: str, term: Term, bindings: Mapping[str, Term]) -> bool:
    stack = [term]
    while stack:
        current = stack.pop()
        while isinstance(current, Variable) and current.name in bindings:
            current = bindings[current.name]
        if isinstance(current, Variable):
            if current.name == name:
                return True
        elif isinstance(current, ListTerm):
            stack.extend(current.elements)
        elif isinstance(current, Functional):
            stack.extend(current.arguments)
    return False


def unify(left, right, subst: Optional[Substitution] = None) -> Optional[Substitution]:
    """
    Most general unifier of two terms (or atoms) extending ``subst``.

    Returns None when the terms do not unify. The anonymous variable
    matches anything without creating a binding. When two unbound
    variables meet, the right one is bound to the left one.
    """
    base = subst if subst is not None else EMPTY
    bindings: Dict[str, Term] = dict(base._bindings)
    stack = [(left, right)]

    while stack:
        a, b = stack.pop()
        while isinstance(a, Variable) and a.name in bindings:
            a = bindings[a.name]
        while isinstance(b, Variable) and b.name in bindings:
            b = bindings[b.name]

        if a == b:
            continue

        if isinstance(b, Variable):
            if b.is_anonymous or (isinstance(a, Variable) and a.is_anonymous):
                continue
            if _occurs(b.name, a, bindings):
                return None
            bindings[b.name] = a
            continue

        if isinstance(a, Variable):
            if a.is_anonymous:
                continue
            if _occurs(a.name, b, bindings):
                return None
            bindings[a.name] = b
            continue

        if isinstance(a, Constant) or isinstance(b, Constant):
            return None

        if isinstance(a, ListTerm) and isinstance(b, ListTerm):
            if len(a.elements) != len(b.elements):
                return None
            stack.extend(reversed(list(zip(a.elements, b.elements))))
            continue

        if isinstance(a, Functional) and isinstance(b, Functional):
            if a.kind != b.kind or a.functor != b.functor:
                return None
            if len(a.arguments) != len(b.arguments):
                return None
            stack.extend(reversed(list(zip(a.arguments, b.arguments))))
            continue

        return None

    result = Substitution.__new__(Substitution)
    result._bindings = bindings
    return result


def unify_or_raise(left, right, subst: Optional[Substitution] = None) -> Substitution:
    """Like ``unify`` but raises ``UnificationError`` on failure."""
    result = unify(left, right, subst)
    if result is None:
        raise UnificationError(left, right)
    return result


def compose_substitutions(first: Substitution, second: Substitution) -> Substitution:
    """Substitution equivalent to applying ``first`` then ``second``."""
    composed = {name: second.resolve(first.resolve(Variable(name))) for name in first}
    for name, term in second.items():
        if name not in composed:
            composed[name] = second.resolve(term)
    return Substitution(
        {name: term for name, term in composed.items() if term != Variable(name)}
    )


def is_variant(left, right) -> bool:
    """True when the two terms are equal up to a one-to-one variable renaming."""
    forward: Dict[str, str] = {}
    backward: Dict[str, str] = {}
    stack = [(left, right)]
    while stack:
        a, b = stack.pop()
        if isinstance(a, Variable) and isinstance(b, Variable):
            if a.is_anonymous or b.is_anonymous:
                if a.is_anonymous != b.is_anonymous:
                    return False
                continue
            if forward.setdefault(a.name, b.name) != b.name:
                return False
            if backward.setdefault(b.name, a.name) != a.name:
                return False
        elif isinstance(a, Constant) and isinstance(b, Constant):
            if a != b:
                return False
        elif isinstance(a, ListTerm) and isinstance(b, ListTerm):
            if len(a.elements) != len(b.elements):
                return False
            stack.extend(zip(a.elements, b.elements))
        elif isinstance(a, Functional) and isinstance(b, Functional):
            if a.kind != b.kind or a.functor != b.functor:
                return False
            if len(a.arguments) != len(b.arguments):
                return False
            stack.extend(zip(a.arguments, b.arguments))
        else:
            return False
    return True


def variable_names(*targets) -> Set[str]:
    """Names of the named variables occurring in the given objects."""
    names: Set[str] = set()
    for target in targets:
        for variable in target.variables():
            if not variable.is_anonymous:
                names.add(variable.name)
    return names


class FreshVariables:
    """
    Deterministic source of fresh variable names.

    Generated names start with ``_`` followed by a base and a counter and
    never clash with the names passed in ``avoid``.
    """

    def __init__(self, avoid: Iterable[str] = ()):
        self._avoid: Set[str] = set(avoid)
        self._counter = 0

    def avoid(self, names: Iterable[str]) -> None:
        self._avoid.update(names)

    def fresh(self, base: str = 'G') -> Variable:
        base = base.lstrip('_').rstrip('0123456789') or 'G'
        while True:
            self._counter += 1
            name = f"_{base}{self._counter}"
            if name not in self._avoid:
                self._avoid.add(name)
                return Variable(name)

    def renaming(self, *targets) -> Substitution:
        """A renaming of every named variable in ``targets`` to fresh ones."""
        mapping: Dict[str, Term] = {}
        for target in targets:
            for variable in target.variables():
                if variable.is_anonymous or variable.name in mapping:
                    continue
                mapping[variable.name] = self.fresh(variable.name)
        result = Substitution.__new__(Substitution)
        result._bindings = mapping
        return result

    def rename(self, target):
        """Standardize ``target`` apart, naming anonymous variables too."""
        renaming = self.renaming(target)

        def rename_one(variable: Variable) -> Term:
            if variable.is_anonymous:
                return self.fresh()
            return renaming.get(variable.name) or variable

        return target.map_variables(rename_one)


def subsumes(general, specific) -> bool:
    """True when ``specific`` is an instance of ``general`` (one-way matching)."""
    renamed = FreshVariables(avoid=variable_names(specific)).rename(general)
    subst = unify(renamed, specific)
    if subst is None:
        return False
    return is_variant(subst.resolve(specific), specific)
