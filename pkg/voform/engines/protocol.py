"""
Protocol building blocks: locutions, role labels, operations, clauses and roles.

An operation is ``PRE [send|receive(locution, partner, partnerRole)] POST``.
A role pairs a label such as ``provider(S)`` with the clause that plays it;
the label's parameter and the clause share variables.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional, Tuple

from voform.core.errors import TermError
from voform.core.formulas import Formula
from voform.core.terms import (
    NUMBER_PATTERN,
    SYMBOL_PATTERN,
    FreshVariables,
    ServiceTerm,
    Substitution,
    Term,
    subsumes,
    unify,
    variable_names,
)


REQUESTER = 'requester'
PROVIDER = 'provider'


class Direction(Enum):
    SEND = "send"
    RECEIVE = "receive"


def _check_name(name: str, what: str) -> None:
    if not SYMBOL_PATTERN.match(name) or NUMBER_PATTERN.match(name):
        raise TermError(f"Invalid {what}: {name!r}")


@dataclass(frozen=True)
class Locution:
    """A performative with at most one content term."""

    performative: str
    content: Optional[Term] = None

    def __post_init__(self):
        _check_name(self.performative, 'performative')

    def map_variables(self, fn) -> 'Locution':
        if self.content is None:
            return self
        return Locution(self.performative, self.content.map_variables(fn))

    def variables(self) -> Iterator:
        if self.content is not None:
            yield from self.content.variables()

    def substitute(self, subst: Substitution) -> 'Locution':
        return self.map_variables(subst.resolve)

    def __str__(self) -> str:
        if self.content is None:
            return self.performative
        return f"{self.performative}({self.content})"


@dataclass(frozen=True)
class RoleLabel:
    """A role name with an optional parameter, e.g. ``provider(satImage(In,Out))``."""

    name: str
    parameter: Optional[Term] = None

    def __post_init__(self):
        _check_name(self.name, 'role name')
        if self.name in (REQUESTER, PROVIDER) and self.parameter is None:
            raise TermError(f"Role {self.name} needs a service parameter")

    @property
    def service_name(self) -> Optional[str]:
        if isinstance(self.parameter, ServiceTerm):
            return self.parameter.name
        return None

    def map_variables(self, fn) -> 'RoleLabel':
        if self.parameter is None:
            return self
        return RoleLabel(self.name, self.parameter.map_variables(fn))

    def variables(self) -> Iterator:
        if self.parameter is not None:
            yield from self.parameter.variables()

    def substitute(self, subst: Substitution) -> 'RoleLabel':
        return self.map_variables(subst.resolve)

    def __str__(self) -> str:
        if self.parameter is None:
            return self.name
        return f"{self.name}({self.parameter})"


def unify_labels(left: RoleLabel, right: RoleLabel, subst: Optional[Substitution] = None):
    if left.name != right.name:
        return None
    if left.parameter is None or right.parameter is None:
        if left.parameter is right.parameter:
            return subst if subst is not None else Substitution()
        return None
    return unify(left.parameter, right.parameter, subst)


def unify_locutions(left: Locution, right: Locution, subst: Optional[Substitution] = None):
    if left.performative != right.performative:
        return None
    if left.content is None or right.content is None:
        if left.content is right.content:
            return subst if subst is not None else Substitution()
        return None
    return unify(left.content, right.content, subst)


@dataclass(frozen=True)
class ProtocolOperation:
    """One guarded communicative action of a protocol clause."""

    precondition: Formula
    direction: Direction
    locution: Locution
    partner: Term
    partner_role: RoleLabel
    postcondition: Formula

    def __post_init__(self):
        allowed = variable_names(self.precondition, self.locution, self.partner, self.partner_role)
        invented = variable_names(self.postcondition) - allowed
        if invented:
            raise TermError(
                f"Postcondition of {self} introduces variables: {', '.join(sorted(invented))}"
            )

    @property
    def action(self) -> str:
        return f"{self.direction.value}({self.locution},{self.partner},{self.partner_role})"

    def map_variables(self, fn) -> 'ProtocolOperation':
        return ProtocolOperation(
            precondition=self.precondition.map_variables(fn),
            direction=self.direction,
            locution=self.locution.map_variables(fn),
            partner=self.partner.map_variables(fn),
            partner_role=self.partner_role.map_variables(fn),
            postcondition=self.postcondition.map_variables(fn),
        )

    def variables(self) -> Iterator:
        yield from self.precondition.variables()
        yield from self.locution.variables()
        yield from self.partner.variables()
        yield from self.partner_role.variables()
        yield from self.postcondition.variables()

    def substitute(self, subst: Substitution) -> 'ProtocolOperation':
        return self.map_variables(subst.resolve)

    def __str__(self) -> str:
        return f"{self.precondition} [{self.action}] {self.postcondition}"


@dataclass(frozen=True)
class ProtocolClause:
    """A named, ordered, non-empty list of operations."""

    name: str
    operations: Tuple[ProtocolOperation, ...]

    def __post_init__(self):
        if not self.name:
            raise TermError("Protocol clauses need a name")
        object.__setattr__(self, 'operations', tuple(self.operations))
        if not self.operations:
            raise TermError(f"Protocol clause {self.name} has no operations")

    def map_variables(self, fn) -> 'ProtocolClause':
        return ProtocolClause(self.name, tuple(op.map_variables(fn) for op in self.operations))

    def variables(self) -> Iterator:
        for op in self.operations:
            yield from op.variables()

    def substitute(self, subst: Substitution) -> 'ProtocolClause':
        return self.map_variables(subst.resolve)


@dataclass(frozen=True)
class Role:
    """A role label and the protocol clause that plays it."""

    label: RoleLabel
    clause: ProtocolClause

    def map_variables(self, fn) -> 'Role':
        return Role(self.label.map_variables(fn), self.clause.map_variables(fn))

    def variables(self) -> Iterator:
        yield from self.label.variables()
        yield from self.clause.variables()

    def substitute(self, subst: Substitution) -> 'Role':
        return self.map_variables(subst.resolve)

    def standardized(self, fresh: FreshVariables) -> 'Role':
        """Rename every variable of label and clause consistently."""
        return self.substitute(fresh.renaming(self))

    def covers(self, name: str, service: Term) -> bool:
        """True when this role is a ``name`` role whose parameter unifies with ``service``."""
        if self.label.name != name or self.label.parameter is None:
            return False
        fresh = FreshVariables(avoid=variable_names(service))
        renamed = self.standardized(fresh)
        return unify(renamed.label.parameter, service) is not None

    def bind(self, service: Term) -> 'Role':
        """
        Specialize the role to ``service``.

        The role is renamed apart from ``service`` deterministically, so two
        equal roles bound to the same service give equal results. The bound
        label carries ``service`` itself (instantiated where the role is more
        specific), keeping the service's own variable names.

        Raises:
            TermError: If the label parameter does not unify with ``service``
        """
        if self.label.parameter is None:
            raise TermError(f"Role {self.label} has no parameter to bind")
        fresh = FreshVariables(avoid=variable_names(service) | variable_names(self))
        renamed = self.standardized(fresh)
        subst = unify(service, renamed.label.parameter)
        if subst is None:
            raise TermError(f"Role {self.label} cannot play {service}")
        return Role(
            RoleLabel(self.label.name, subst.resolve(service)),
            renamed.clause.substitute(subst),
        )

    def is_instance_of(self, general: 'Role') -> bool:
        """Same clause name and a label that ``general``'s label subsumes."""
        if self.clause.name != general.clause.name or self.label.name != general.label.name:
            return False
        if general.label.parameter is None or self.label.parameter is None:
            return general.label.parameter is self.label.parameter
        return subsumes(general.label.parameter, self.label.parameter)

    def __str__(self) -> str:
        return f"<{self.label}, {self.clause.name}>"
