"""
Agent society assembly and well-formedness.

A society is the population from which organisations form: its agents,
the services they can exchange and the roles they can play. Workflows are
not enumerated; ``AgentSociety.admits_workflow`` decides membership.
"""

from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

from voform.core.formulas import Atom
from voform.core.report import CheckReport
from voform.core.terms import SYMBOL_PATTERN, NUMBER_PATTERN, ServiceTerm, Term, subsumes
from voform.core.workflow import Workflow
from voform.engines.coherence import check_role_goal_coherence
from voform.engines.protocol import PROVIDER, Role, RoleLabel
from voform.society.agents import AgentSpec
from voform.utils.logger import get_logger

logger = get_logger(__name__)


class SocietyValidationError(Exception):
    """A society violates one or more well-formedness rules."""

    def __init__(self, report: CheckReport):
        self.report = report
        codes = ', '.join(dict.fromkeys(report.failed_names()))
        super().__init__(f"Invalid agent society: {codes}")


@dataclass(frozen=True)
class AgentSociety:
    """Agents, services and shared ontology facts."""

    agents: Tuple[AgentSpec, ...]
    services: Tuple[ServiceTerm, ...]
    ontology: Tuple[Atom, ...] = ()

    @property
    def ids(self) -> Tuple[str, ...]:
        return tuple(a.agent_id for a in self.agents)

    @property
    def roles(self) -> Tuple[Role, ...]:
        """Union of every agent's roles, in declaration order."""
        return tuple(dict.fromkeys(r for a in self.agents for r in a.roles))

    def agent(self, agent_id: str) -> Optional[AgentSpec]:
        for agent in self.agents:
            if agent.agent_id == agent_id:
                return agent
        return None

    def service_named(self, name: str) -> Optional[ServiceTerm]:
        for service in self.services:
            if service.name == name:
                return service
        return None

    def providers_of(self, service: Term) -> List[str]:
        return [a.agent_id for a in self.agents if a.is_provider_of(service)]

    def requesters_of(self, service: Term) -> List[str]:
        return [a.agent_id for a in self.agents if a.is_requester_of(service)]

    def clauses_for(self, name: str, service: Term) -> List[str]:
        """Names of the protocol clauses any agent uses to play ``name(service)``."""
        return list(dict.fromkeys(
            r.clause.name for r in self.roles if r.covers(name, service)
        ))

    def holds_role_label(self, agent_id: str, label: RoleLabel) -> bool:
        """True when ``label`` is an instance of one of the agent's role labels."""
        agent = self.agent(agent_id)
        if agent is None:
            return False
        for role in agent.roles:
            if role.label.name != label.name:
                continue
            if role.label.parameter is None or label.parameter is None:
                if role.label.parameter is label.parameter:
                    return True
                continue
            if subsumes(role.label.parameter, label.parameter):
                return True
        return False

    def admits_workflow(self, workflow: Workflow) -> bool:
        """Every service of ``workflow`` instantiates one of the society's services."""
        return all(
            any(subsumes(general, service) for general in self.services)
            for service in workflow.services
        )


def _valid_agent_id(agent_id: str) -> bool:
    return bool(SYMBOL_PATTERN.match(agent_id)) and not NUMBER_PATTERN.match(agent_id)


def validate_society(agents: Iterable[AgentSpec], services: Iterable[ServiceTerm]) -> CheckReport:
    """
    Check every society rule and return a report of all of them.

    Check names double as violation codes.
    """
    agents = tuple(agents)
    services = tuple(services)
    report = CheckReport(subject="agent society")

    report.add('FewerThanTwoAgents', len(agents) >= 2, f"{len(agents)} agent(s) declared")
    report.add('EmptyServices', bool(services), f"{len(services)} service(s) declared")

    seen = set()
    for agent in agents:
        duplicate = agent.agent_id in seen
        seen.add(agent.agent_id)
        if duplicate:
            report.add('DuplicateAgentId', False, "declared more than once", subject=agent.agent_id)
        report.add('InvalidAgentId', _valid_agent_id(agent.agent_id),
                   "ids must be lower-camel symbols", subject=agent.agent_id)
        report.add('AgentWithoutRoles', bool(agent.roles), subject=agent.agent_id)
        report.add('AgentWithoutGoals', bool(agent.goals), subject=agent.agent_id)

        coherence = check_role_goal_coherence(agent)
        failed = coherence.failures
        detail = "; ".join(
            f"{'a' if f.name == 'role-enables-goal' else 'b'}: {f.subject} ({f.detail})" for f in failed
        )
        report.add('IncoherentAgent', not failed, detail, subject=agent.agent_id)

    names = [s.name for s in services]
    for service in services:
        if names.count(service.name) > 1:
            report.add('DuplicateService', False, "service name declared twice", subject=service.name)
            continue
        providers = [a.agent_id for a in agents if a.is_provider_of(service)]
        report.add(
            'ServiceWithoutProvider',
            bool(providers),
            f"provided by {', '.join(providers)}" if providers else "no agent holds a provider role",
            subject=service.name,
        )
        requesters = [a.agent_id for a in agents if a.is_requester_of(service)]
        report.add(
            'MissingRequesterRole',
            bool(requesters),
            f"requested by {', '.join(requesters)}" if requesters else "no agent holds a requester role",
            subject=service.name,
        )

    return report


def build_society(
    agents: Iterable[AgentSpec],
    services: Iterable[ServiceTerm],
    ontology: Iterable[Atom] = (),
) -> AgentSociety:
    """
    Assemble a society after checking every well-formedness rule.

    Raises:
        SocietyValidationError: If any rule is violated; the error carries
            the full report
    """
    agents = tuple(agents)
    services = tuple(services)
    report = validate_society(agents, services)
    if not report.passed:
        for failure in report.failures:
            logger.debug("Society check %s failed for %s: %s", failure.name, failure.subject, failure.detail)
        raise SocietyValidationError(report)

    society = AgentSociety(agents, services, tuple(ontology))
    logger.debug("Built society with %d agents and %d services", len(agents), len(services))
    return society


def provider_label(service: Term) -> RoleLabel:
    return RoleLabel(PROVIDER, service)