"""
Partial virtual organisations: the states of the formation process.

Each state records its members (agent ids with the subsets of roles and
goals they contribute), the organisation's goals and roles, the abstract
and agreed workflows and the contracts.
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from voform.contracts.contract import Contract
from voform.core.constraints import ConstraintAnnotation
from voform.core.formulas import Atom
from voform.core.syntax import parse_atom, parse_constraint, parse_operation, parse_role_label, parse_service
from voform.core.workflow import Workflow
from voform.engines.protocol import ProtocolClause, Role


class Stage(Enum):
    EMPTY = "Empty"
    GOALS_IDENTIFIED = "GoalsIdentified"
    PARTNERS_DISCOVERED = "PartnersDiscovered"
    PARTNERS_SELECTED = "PartnersSelected"
    ROLES_ESTABLISHED = "RolesEstablished"
    WORKFLOW_AGREED = "WorkflowAgreed"
    CONTRACTS_AGREED = "ContractsAgreed"

    @property
    def rank(self) -> int:
        return list(Stage).index(self)

    def __lt__(self, other: 'Stage') -> bool:
        return self.rank < other.rank

    def __le__(self, other: 'Stage') -> bool:
        return self.rank <= other.rank


@dataclass(frozen=True)
class PartialAgent:
    """A member: an agent id with the roles and goals it brings."""
    agent_id: str
    roles: Tuple[Role, ...] = ()
    goals: Tuple[Atom, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'roles', tuple(dict.fromkeys(self.roles)))
        object.__setattr__(self, 'goals', tuple(dict.fromkeys(self.goals)))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'id': self.agent_id,
            'roles': [role_to_dict(r) for r in self.roles],
            'goals': [str(g) for g in self.goals],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PartialAgent':
        return cls(
            agent_id=data['id'],
            roles=tuple(role_from_dict(r) for r in data.get('roles', [])),
            goals=tuple(parse_atom(g) for g in data.get('goals', [])),
        )


def role_to_dict(role: Role) -> Dict[str, Any]:
    return {
        'label': str(role.label),
        'protocol': role.clause.name,
        'operations': [str(op) for op in role.clause.operations],
    }


def role_from_dict(data: Dict[str, Any]) -> Role:
    return Role(
        parse_role_label(data['label']),
        ProtocolClause(data['protocol'], tuple(parse_operation(op) for op in data['operations'])),
    )


def workflow_to_dict(workflow: Optional[Workflow]) -> Optional[Dict[str, Any]]:
    if workflow is None:
        return None
    return {
        'services': [str(s) for s in workflow.services],
        'annotation': [str(c) for c in workflow.annotation],
    }


def workflow_from_dict(data: Optional[Dict[str, Any]]) -> Optional[Workflow]:
    if data is None:
        return None
    return Workflow(
        tuple(parse_service(s) for s in data['services']),
        ConstraintAnnotation(tuple(parse_constraint(c) for c in data.get('annotation', []))),
    )


@dataclass(frozen=True)
class PartialVO:
    """
    One state of the formation process.

    Members are kept sorted by agent id. ``initial_goals`` are the goals the
    initiator set out to fulfil; ``goals`` and ``roles`` are the
    organisation-level sets.
    """
    stage: Stage = Stage.EMPTY
    initiator: Optional[str] = None
    agents: Tuple[PartialAgent, ...] = ()
    initial_goals: Tuple[Atom, ...] = ()
    goals: Tuple[Atom, ...] = ()
    roles: Tuple[Role, ...] = ()
    abstract_workflow: Optional[Workflow] = None
    workflow: Optional[Workflow] = None
    contracts: Tuple[Contract, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, 'agents', tuple(sorted(self.agents, key=lambda a: a.agent_id)))
        object.__setattr__(self, 'goals', tuple(dict.fromkeys(self.goals)))
        object.__setattr__(self, 'roles', tuple(dict.fromkeys(self.roles)))

    @property
    def ids(self) -> Tuple[str, ...]:
        return tuple(a.agent_id for a in self.agents)

    def member(self, agent_id: str) -> Optional[PartialAgent]:
        for agent in self.agents:
            if agent.agent_id == agent_id:
                return agent
        return None

    def evolve(self, **changes) -> 'PartialVO':
        return replace(self, **changes)

    def member_goals(self) -> List[Atom]:
        return list(dict.fromkeys(g for a in self.agents for g in a.goals))

    def member_roles(self) -> List[Role]:
        return list(dict.fromkeys(r for a in self.agents for r in a.roles))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'stage': self.stage.value,
            'initiator': self.initiator,
            'agents': [a.to_dict() for a in self.agents],
            'initial_goals': [str(g) for g in self.initial_goals],
            'goals': [str(g) for g in self.goals],
            'roles': [role_to_dict(r) for r in self.roles],
            'abstract_workflow': workflow_to_dict(self.abstract_workflow),
            'workflow': workflow_to_dict(self.workflow),
            'contracts': [c.to_dict() for c in self.contracts],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PartialVO':
        return cls(
            stage=Stage(data['stage']),
            initiator=data.get('initiator'),
            agents=tuple(PartialAgent.from_dict(a) for a in data.get('agents', [])),
            initial_goals=tuple(parse_atom(g) for g in data.get('initial_goals', [])),
            goals=tuple(parse_atom(g) for g in data.get('goals', [])),
            roles=tuple(role_from_dict(r) for r in data.get('roles', [])),
            abstract_workflow=workflow_from_dict(data.get('abstract_workflow')),
            workflow=workflow_from_dict(data.get('workflow')),
            contracts=tuple(Contract.from_dict(c) for c in data.get('contracts', [])),
        )
