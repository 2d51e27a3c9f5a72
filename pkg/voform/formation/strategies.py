"""
Pluggable decision points of the formation process.

Each nondeterministic choice a transition makes is delegated to a strategy
object. Strategies are deterministic functions of their inputs plus an
explicit seed, so a run is reproducible from (scenario, seed).
"""

import random
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from voform.core.constraints import ConstraintAnnotation
from voform.core.formulas import Atom
from voform.core.terms import ServiceTerm, is_variant
from voform.core.workflow import Workflow
from voform.engines.dialogue import DialogueTranscript
from voform.engines.protocol import PROVIDER, REQUESTER, Role, RoleLabel
from voform.formation.errors import AmbiguousProtocol, NoProtocolForRole
from voform.formation.partial_vo import PartialAgent, PartialVO
from voform.formation.settings import FormationSettings, requested_service
from voform.society.agents import AgentSpec
from voform.society.society import AgentSociety
from voform.utils.logger import get_logger

logger = get_logger(__name__)


ROLE_CHOICES = ("first", "strict")
PROVIDER_CHOICES = ("first", "seeded")


class GoalSelector(ABC):
    """Picks G_init among the initiator's goals it cannot fulfil alone."""

    @abstractmethod
    def select(self, agent: AgentSpec, unfulfilled: Sequence[Atom]) -> List[Atom]:
        """
        Select the goals to form an organisation for.

        Args:
            agent: The initiator
            unfulfilled: Its goals that fail in isolation, in declared order

        Returns:
            A subset of ``unfulfilled``, in declared order
        """
        pass


class TrustFilter(ABC):
    """Prunes discovered partners."""

    @abstractmethod
    def prune(self, candidates: Sequence[str], initiator: str) -> List[str]:
        """
        Return the candidate ids that are kept, in the given order.

        The initiator is never among ``candidates``.
        """
        pass


class RoleAssigner(ABC):
    """Gives members the roles they play in the organisation."""

    @abstractmethod
    def assign(self, vo: PartialVO, society: AgentSociety) -> List[PartialAgent]:
        """
        Assign roles for every requested service.

        Returns:
            Every selected member (possibly with new roles) plus any extra
            agents the assigner brings in
        """
        pass


class ProviderChooser(ABC):
    """Picks one provider per service among the successful dialogues."""

    @abstractmethod
    def choose(self, service, successes: Sequence[DialogueTranscript]) -> DialogueTranscript:
        """Pick one transcript; ``successes`` is non-empty and in id order."""
        pass


class WorkflowExtender(ABC):
    """Lets the initiator add constraints or concrete services to the agreed workflow."""

    @abstractmethod
    def extend(self, vo: PartialVO, workflow: Workflow) -> Workflow:
        pass


class UnfulfilledGoalSelector(GoalSelector):
    """
    Selects every unfulfilled goal, or, given a request, the unfulfilled
    goals matching the request's decomposition.
    """

    def __init__(self, request: Optional[Atom] = None):
        self.request = request

    def select(self, agent: AgentSpec, unfulfilled: Sequence[Atom]) -> List[Atom]:
        if self.request is None:
            return list(unfulfilled)

        subgoals = agent.expand_request(self.request)
        if subgoals is None:
            logger.warning("%s cannot decompose request %s", agent.agent_id, self.request)
            return []

        logger.debug("Request %s decomposes into %s", self.request, ', '.join(map(str, subgoals)))
        return [g for g in unfulfilled if any(is_variant(g, sub) for sub in subgoals)]


class AllowListTrustFilter(TrustFilter):
    """Keeps the allow-listed candidates (all when no list is given) minus the denied ones."""

    def __init__(self, allow: Optional[Sequence[str]] = None, deny: Sequence[str] = ()):
        self.allow = None if allow is None else frozenset(allow)
        self.deny = frozenset(deny)

    def prune(self, candidates: Sequence[str], initiator: str) -> List[str]:
        kept = []
        for candidate in candidates:
            if candidate == initiator:
                continue
            if candidate in self.deny or (self.allow is not None and candidate not in self.allow):
                logger.debug("Pruned untrusted partner %s", candidate)
                continue
            kept.append(candidate)
        return kept


class FirstProtocolRoleAssigner(RoleAssigner):
    """
    Requester roles go to the initiator (or the service's delegate); provider
    roles go to every selected provider holding the chosen protocol clause.

    A label's clause is the explicit choice when one is configured, otherwise
    the first clause in member id order. With ``choice="strict"`` several
    candidate clauses and no explicit choice raise AmbiguousProtocol.
    """

    def __init__(
        self,
        choice: str = "first",
        clause_choices: Optional[Mapping[str, str]] = None,
        delegates: Optional[Mapping[str, str]] = None,
    ):
        if choice not in ROLE_CHOICES:
            raise ValueError(f"Unknown role choice: {choice}")
        self.choice = choice
        self.clause_choices = dict(clause_choices or {})
        self.delegates = dict(delegates or {})

    def _choose_clause(self, society: AgentSociety, agent_ids: Sequence[str], name: str, service) -> str:
        label = RoleLabel(name, service)
        options: List[str] = []
        for agent_id in agent_ids:
            for role in society.agent(agent_id).roles_covering(name, service):
                if role.clause.name not in options:
                    options.append(role.clause.name)
        if not options:
            raise NoProtocolForRole(label, "no selected agent can play it")

        chosen = self.clause_choices.get(f"{name}({service.name})")
        if chosen is not None:
            if chosen not in options:
                raise NoProtocolForRole(label, f"configured clause {chosen} is not available")
            return chosen
        if len(options) > 1 and self.choice == "strict":
            raise AmbiguousProtocol(label, options)
        return options[0]

    @staticmethod
    def _bound_role(spec: AgentSpec, name: str, clause: str, service) -> Role:
        for role in spec.roles_covering(name, service):
            if role.clause.name == clause:
                return role.bind(service)
        raise NoProtocolForRole(RoleLabel(name, service), f"{spec.agent_id} lacks clause {clause}")

    def assign(self, vo: PartialVO, society: AgentSociety) -> List[PartialAgent]:
        roles: Dict[str, List[Role]] = {a.agent_id: list(a.roles) for a in vo.agents}
        goals: Dict[str, Tuple[Atom, ...]] = {a.agent_id: a.goals for a in vo.agents}

        for goal in vo.initial_goals:
            service = requested_service(goal)
            if service is None:
                continue

            requester_id = self.delegates.get(service.name, vo.initiator)
            requester = society.agent(requester_id)
            if requester is None:
                raise NoProtocolForRole(RoleLabel(REQUESTER, service), f"unknown delegate {requester_id}")
            clause = self._choose_clause(society, [requester_id], REQUESTER, service)
            roles.setdefault(requester_id, []).append(self._bound_role(requester, REQUESTER, clause, service))
            goals.setdefault(requester_id, ())

            providers = [
                agent_id for agent_id in sorted(roles)
                if agent_id != requester_id and society.agent(agent_id).is_provider_of(service)
            ]
            clause = self._choose_clause(society, providers, PROVIDER, service)
            for agent_id in providers:
                spec = society.agent(agent_id)
                if any(r.clause.name == clause for r in spec.roles_covering(PROVIDER, service)):
                    roles[agent_id].append(self._bound_role(spec, PROVIDER, clause, service))

            logger.debug("Roles for %s: requester %s, providers with clause %s", service, requester_id, clause)

        return [PartialAgent(agent_id, tuple(roles[agent_id]), goals[agent_id]) for agent_id in sorted(roles)]


class FirstSuccessProviderChooser(ProviderChooser):
    def choose(self, service, successes: Sequence[DialogueTranscript]) -> DialogueTranscript:
        return successes[0]


class SeededProviderChooser(ProviderChooser):
    """Picks uniformly among successes with a seeded generator."""

    def __init__(self, seed: int = 0):
        self.seed = seed
        self._random = random.Random(seed)

    def choose(self, service, successes: Sequence[DialogueTranscript]) -> DialogueTranscript:
        return successes[self._random.randrange(len(successes))]


class NoWorkflowExtension(WorkflowExtender):
    def extend(self, vo: PartialVO, workflow: Workflow) -> Workflow:
        return workflow


@dataclass
class WorkflowPlan:
    """Per-service templates plus the annotation over their variables."""
    templates: Tuple[ServiceTerm, ...] = ()
    annotation: ConstraintAnnotation = field(default_factory=ConstraintAnnotation)

    def template_for(self, service_name: str) -> Optional[ServiceTerm]:
        for template in self.templates:
            if template.name == service_name:
                return template
        return None


@dataclass
class FormationStrategy:
    goal_selector: GoalSelector = field(default_factory=UnfulfilledGoalSelector)
    trust_filter: TrustFilter = field(default_factory=AllowListTrustFilter)
    role_assigner: RoleAssigner = field(default_factory=FirstProtocolRoleAssigner)
    provider_chooser: ProviderChooser = field(default_factory=FirstSuccessProviderChooser)
    workflow_extender: WorkflowExtender = field(default_factory=NoWorkflowExtension)
    workflow_plan: WorkflowPlan = field(default_factory=WorkflowPlan)
    exhaustive: bool = False

    @classmethod
    def from_settings(cls, settings: FormationSettings) -> 'FormationStrategy':
        """Default strategies configured from (resolved) settings."""
        if settings.provider_choice not in PROVIDER_CHOICES:
            raise ValueError(f"Unknown provider choice: {settings.provider_choice}")
        chooser: ProviderChooser = (
            SeededProviderChooser(settings.seed or 0)
            if settings.provider_choice == "seeded" else FirstSuccessProviderChooser()
        )
        return cls(
            goal_selector=UnfulfilledGoalSelector(settings.request),
            trust_filter=AllowListTrustFilter(settings.allow, settings.deny),
            role_assigner=FirstProtocolRoleAssigner(
                settings.role_choice or "first",
                dict(settings.clause_choices),
                dict(settings.delegates),
            ),
            provider_chooser=chooser,
            workflow_plan=WorkflowPlan(settings.templates, settings.annotation),
            exhaustive=bool(settings.exhaustive_negotiation),
        )
