"""
Discovery registry: who provides what.

A registry is an immutable set of ``provides(agent, service)`` facts tied to
a society; ``register`` returns a new registry.
"""

from dataclasses import dataclass
from typing import FrozenSet, Iterator, Tuple

from voform.core.formulas import Atom
from voform.core.terms import Constant, FreshVariables, ServiceTerm, unify, variable_names
from voform.society.society import AgentSociety
from voform.utils.logger import get_logger

logger = get_logger(__name__)


class RegistryError(Exception):
    """Base exception for registry errors."""
    pass


class UnknownAgent(RegistryError):
    """The agent is not a member of the society."""

    def __init__(self, agent_id: str):
        self.agent_id = agent_id
        super().__init__(f"Unknown agent: {agent_id}")


class AgentNotProvider(RegistryError):
    """The agent holds no provider role for the service."""

    def __init__(self, agent_id: str, service: ServiceTerm):
        self.agent_id = agent_id
        self.service = service
        super().__init__(f"{agent_id} holds no provider role for {service.name}")


class UnknownService(RegistryError):
    """The service name is not one of the society's services."""

    def __init__(self, service: ServiceTerm):
        self.service = service
        super().__init__(f"Unknown service: {service.name}")


@dataclass(frozen=True)
class Registry:
    society: AgentSociety
    facts: Tuple[Tuple[str, ServiceTerm], ...] = ()

    def __iter__(self) -> Iterator[Tuple[str, ServiceTerm]]:
        return iter(self.facts)

    def __len__(self) -> int:
        return len(self.facts)

    def ontology_facts(self) -> Tuple[Atom, ...]:
        """The registry as ``provides(agent, service)`` atoms."""
        return tuple(Atom('provides', (Constant(a), s)) for a, s in self.facts)


def empty_registry(society: AgentSociety) -> Registry:
    return Registry(society)


def register(reg: Registry, agent: str, service: ServiceTerm) -> Registry:
    """
    Record that ``agent`` provides ``service``.

    Registering an existing fact returns the registry unchanged.

    Raises:
        UnknownAgent: If the agent is not in the society
        UnknownService: If no society service has the service's name
        AgentNotProvider: If the agent holds no provider role with that service name
    """
    spec = reg.society.agent(agent)
    if spec is None:
        raise UnknownAgent(agent)
    if reg.society.service_named(service.name) is None:
        raise UnknownService(service)
    if not any(r.label.name == 'provider' and r.label.service_name == service.name for r in spec.roles):
        raise AgentNotProvider(agent, service)

    fact = (agent, service)
    if fact in reg.facts:
        return reg

    logger.debug("Registered %s as provider of %s", agent, service)
    return Registry(reg.society, reg.facts + (fact,))


def query_providers(reg: Registry, goal_service: ServiceTerm) -> FrozenSet[str]:
    """Agents with a registered service that unifies with ``goal_service``."""
    fresh = FreshVariables(avoid=variable_names(goal_service))
    return frozenset(
        agent for agent, service in reg.facts
        if unify(fresh.rename(service), goal_service) is not None
    )
