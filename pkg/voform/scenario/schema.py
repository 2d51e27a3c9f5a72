"""
Scenario file schema.

A scenario is one JSON document with five top-level keys:

    name        scenario name
    protocols   protocol clause name -> {"label": ..., "operations": [...]}
    society     {"services": [...], "ontology": [...], "agents": [...]}
    registry    [{"agent": ..., "service": ...}, ...]
    formation   initiator, request, trust lists, role choices, templates,
                annotation, guarantees and run knobs

Terms, formulas, operations and constraints are written in the canonical
text syntax (see ``voform.core.syntax``) inside JSON strings.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

from voform.engines.protocol import Role
from voform.formation.settings import FormationSettings
from voform.society.registry import Registry
from voform.society.society import AgentSociety
from voform.society.agents import AgentSpec


SCENARIO_KEYS = ('name', 'protocols', 'society', 'registry', 'formation')


@dataclass(frozen=True)
class ScenarioFile:
    """A fully validated scenario."""
    name: str
    protocols: Tuple[Tuple[str, Role], ...]
    society: AgentSociety
    registry: Registry
    settings: FormationSettings

    def protocol(self, name: str) -> Optional[Role]:
        return dict(self.protocols).get(name)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'protocols': {
                name: {
                    'label': str(role.label),
                    'operations': [str(op) for op in role.clause.operations],
                }
                for name, role in self.protocols
            },
            'society': {
                'services': [str(s) for s in self.society.services],
                'ontology': [str(a) for a in self.society.ontology],
                'agents': [_agent_to_dict(a) for a in self.society.agents],
            },
            'registry': [
                {'agent': agent, 'service': str(service)} for agent, service in self.registry.facts
            ],
            'formation': _settings_to_dict(self.settings),
        }


def _agent_to_dict(agent: AgentSpec) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        'id': agent.agent_id,
        'roles': [{'protocol': r.clause.name, 'label': str(r.label)} for r in agent.roles],
        'goals': [str(g) for g in agent.goals],
        'knowledge': [str(a) for a in agent.knowledge],
        'fulfilments': [
            {'goal': str(p.goal), 'by': str(p.fulfilled_by)} for p in agent.fulfilments
        ],
    }
    if agent.decompositions:
        data['decompositions'] = [
            {'head': str(d.head), 'subgoals': [str(g) for g in d.subgoals]}
            for d in agent.decompositions
        ]
    return data


def _settings_to_dict(settings: FormationSettings) -> Dict[str, Any]:
    data: Dict[str, Any] = {'initiator': settings.initiator}
    if settings.request is not None:
        data['request'] = str(settings.request)

    trust: Dict[str, List[str]] = {}
    if settings.allow is not None:
        trust['allow'] = list(settings.allow)
    if settings.deny:
        trust['deny'] = list(settings.deny)
    if trust:
        data['trust'] = trust

    if settings.role_choice is not None:
        data['role_choice'] = settings.role_choice
    if settings.clause_choices:
        data['clause_choices'] = dict(settings.clause_choices)
    if settings.delegates:
        data['delegates'] = dict(settings.delegates)
    if settings.templates:
        data['templates'] = [str(t) for t in settings.templates]
    if settings.annotation:
        data['annotation'] = [str(c) for c in settings.annotation]
    if settings.guarantees:
        data['guarantees'] = {
            name: [str(f) for f in formulas] for name, formulas in settings.guarantees
        }
    if settings.provider_choice != "first":
        data['provider_choice'] = settings.provider_choice
    if settings.exhaustive_negotiation is not None:
        data['exhaustive_negotiation'] = settings.exhaustive_negotiation
    if settings.max_dialogue_steps is not None:
        data['max_dialogue_steps'] = settings.max_dialogue_steps
    if settings.seed is not None:
        data['seed'] = settings.seed
    return data
