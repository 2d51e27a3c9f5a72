"""
Contracts between organisation members.

A contract names its parties and the roles they play (context), the
services it covers (SDT) and its guarantee terms (GT). Guarantee terms
are kept as opaque formulas.
"""

import re
from dataclasses import dataclass
from typing import Any, Collection, Dict, Iterable, List, Optional, Tuple

from voform.core.formulas import Formula
from voform.core.report import CheckReport
from voform.core.syntax import parse_formula, parse_role_label, parse_service
from voform.core.terms import ServiceTerm, unify
from voform.core.workflow import Workflow
from voform.engines.protocol import PROVIDER, REQUESTER, RoleLabel
from voform.society.society import AgentSociety
from voform.utils.logger import get_logger

logger = get_logger(__name__)


CID_PATTERN = re.compile(r'^[a-z0-9][A-Za-z0-9_.\-]*$')


class ContractError(Exception):
    """Base exception for contract errors."""
    pass


class SameParty(ContractError):
    """Requester and provider of a drafted contract are the same agent."""

    def __init__(self, agent_id: str):
        self.agent_id = agent_id
        super().__init__(f"{agent_id} cannot contract with itself")


@dataclass(frozen=True)
class ContextEntry:
    """A party of a contract and the roles it plays in it."""
    agent_id: str
    roles: Tuple[RoleLabel, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {'agent': self.agent_id, 'roles': [str(r) for r in self.roles]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ContextEntry':
        return cls(data['agent'], tuple(parse_role_label(r) for r in data.get('roles', [])))


@dataclass(frozen=True)
class Contract:
    cid: str
    context: Tuple[ContextEntry, ...]
    sdt: Workflow
    gt: Tuple[Formula, ...] = ()

    @property
    def parties(self) -> Tuple[str, ...]:
        return tuple(dict.fromkeys(e.agent_id for e in self.context))

    def roles_of(self, agent_id: str) -> List[RoleLabel]:
        return [r for e in self.context if e.agent_id == agent_id for r in e.roles]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'cid': self.cid,
            'context': [e.to_dict() for e in self.context],
            'sdt': [str(s) for s in self.sdt.services],
            'gt': [str(g) for g in self.gt],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Contract':
        return cls(
            cid=data['cid'],
            context=tuple(ContextEntry.from_dict(e) for e in data.get('context', [])),
            sdt=Workflow(tuple(parse_service(s) for s in data['sdt'])),
            gt=tuple(parse_formula(g) for g in data.get('gt', [])),
        )

    def __str__(self) -> str:
        context = ', '.join(
            f"<{e.agent_id}, {{{', '.join(str(r) for r in e.roles)}}}>" for e in self.context
        )
        gt = ', '.join(str(g) for g in self.gt)
        return f"<{self.cid}, {{{context}}}, {self.sdt}, {{{gt}}}>"


def _plays(labels: Iterable[RoleLabel], name: str, service) -> bool:
    return any(
        label.name == name and label.parameter is not None
        and unify(label.parameter, service) is not None
        for label in labels
    )


def validate_contract(c: Contract, society: AgentSociety) -> CheckReport:
    """
    Check a contract's identifier and its four well-formedness rules.

    Returns:
        A report with the checks ``cid-format``, ``requester-provider-pair``,
        ``no-self-dealing``, ``sdt-coverage`` and ``roles-held``
    """
    report = CheckReport(subject=f"contract {c.cid}")

    report.add('cid-format', bool(CID_PATTERN.match(c.cid)), c.cid)

    pair = None
    for first in c.context:
        for second in c.context:
            if first.agent_id == second.agent_id:
                continue
            for label in first.roles:
                if label.name == REQUESTER and label.parameter is not None \
                        and _plays(second.roles, PROVIDER, label.parameter):
                    pair = (first.agent_id, second.agent_id, label.parameter)
                    break
            if pair:
                break
        if pair:
            break
    report.add(
        'requester-provider-pair',
        pair is not None,
        f"{pair[0]} requests {pair[2]} from {pair[1]}" if pair else
        "no two distinct parties form a requester/provider pair",
    )

    self_dealing = [
        (e.agent_id, label.parameter) for e in c.context for label in e.roles
        if label.name == REQUESTER and label.parameter is not None
        and _plays(e.roles, PROVIDER, label.parameter)
    ]
    report.add(
        'no-self-dealing',
        not self_dealing,
        f"{self_dealing[0][0]} both requests and provides {self_dealing[0][1]}" if self_dealing else "",
    )

    uncovered = [
        s for s in c.sdt.services
        if not any(_plays(e.roles, PROVIDER, s) for e in c.context)
    ]
    report.add(
        'sdt-coverage',
        not uncovered,
        "no provider for " + ', '.join(str(s) for s in uncovered) if uncovered else "",
    )

    unheld = [
        f"{e.agent_id}:{label}" for e in c.context for label in e.roles
        if not society.holds_role_label(e.agent_id, label)
    ]
    report.add(
        'roles-held',
        not unheld,
        "not held in the society: " + ', '.join(unheld) if unheld else "",
    )

    return report


def make_contract_id(initiator: str, service_name: str, seed: int, taken: Collection[str] = ()) -> str:
    """Deterministic contract id, suffixed when it would repeat one in ``taken``."""
    cid = f"{initiator}.{service_name}.{seed}"
    suffix = 1
    candidate = cid
    while candidate in taken:
        suffix += 1
        candidate = f"{cid}.{suffix}"
    return candidate


def draft_contract(
    requester_id: str,
    provider_id: str,
    service: ServiceTerm,
    guarantees: Iterable[Formula] = (),
    id_seed: int = 0,
    initiator: Optional[str] = None,
    taken: Collection[str] = (),
) -> Contract:
    """
    Draft a two-party contract for one service.

    Args:
        requester_id: Agent requesting the service
        provider_id: Agent providing it
        service: The (instantiated) service
        guarantees: Guarantee terms, carried verbatim
        id_seed: Run seed used in the contract id
        initiator: Agent named in the contract id (defaults to the requester)
        taken: Contract ids already in use

    Raises:
        SameParty: If requester and provider are the same agent
    """
    if requester_id == provider_id:
        raise SameParty(requester_id)

    cid = make_contract_id(initiator or requester_id, service.name, id_seed, taken)
    contract = Contract(
        cid=cid,
        context=(
            ContextEntry(requester_id, (RoleLabel(REQUESTER, service),)),
            ContextEntry(provider_id, (RoleLabel(PROVIDER, service),)),
        ),
        sdt=Workflow((service,)),
        gt=tuple(guarantees),
    )
    logger.debug("Drafted contract %s", contract.cid)
    return contract
