"""
The six formation transitions.

Each transition takes a partial VO at one stage and returns the next one,
or raises a ``FormationError``. Choices are delegated to a
``FormationStrategy``; the constraints each transition must satisfy are
re-checked independently by ``voform.formation.checks``.
"""

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from voform.contracts.contract import Contract, SameParty, draft_contract, validate_contract
from voform.core.constraints import ConstraintAnnotation
from voform.core.errors import NonGroundPostcondition, TermError
from voform.core.formulas import Atom, Formula, positive_atoms
from voform.core.report import CheckReport
from voform.core.terms import (
    EMPTY,
    FreshVariables,
    ServiceTerm,
    Substitution,
    compose_substitutions,
    is_variant,
    unify,
    variable_names,
)
from voform.core.workflow import Workflow, instance_substitution
from voform.engines.dialogue import DialogueTranscript, run_dialogue
from voform.engines.knowledge import KnowledgeBase, evaluate
from voform.engines.protocol import PROVIDER, REQUESTER, Role
from voform.formation.errors import (
    AmbiguousProtocol,
    ConstraintViolated,
    ContractInvalid,
    FormationError,
    NegotiationFailed,
    NoProtocolForRole,
    NoUnfulfillableGoals,
    PruningBrokeCoverage,
    StageError,
    TransitionCheckFailed,
    UnknownInitiator,
)
from voform.formation.partial_vo import PartialAgent, PartialVO, Stage
from voform.formation.settings import BUY, requested_service
from voform.formation.strategies import FormationStrategy, WorkflowPlan
from voform.society.registry import Registry, query_providers
from voform.society.society import AgentSociety
from voform.utils.logger import get_logger

logger = get_logger(__name__)

__all__ = [
    'AmbiguousProtocol',
    'ConstraintViolated',
    'ContractInvalid',
    'FormationError',
    'NegotiationFailed',
    'NoProtocolForRole',
    'NoUnfulfillableGoals',
    'PruningBrokeCoverage',
    'StageError',
    'TransitionCheckFailed',
    'UnknownInitiator',
    'TRANSITIONS',
    'WorkflowAgreement',
    'identify_goals',
    'discover_partners',
    'select_partners',
    'establish_roles',
    'derive_abstract_workflow',
    'negotiate_workflow',
    'agree_workflow',
    'agree_contracts',
]


TRANSITIONS = (
    'identify_goals',
    'discover_partners',
    'select_partners',
    'establish_roles',
    'agree_workflow',
    'agree_contracts',
)


def _require_stage(vo: PartialVO, transition: str, expected: Stage) -> None:
    if vo.stage is not expected:
        raise StageError(transition, expected, vo.stage)


def fulfilled_in_isolation(agent, goal: Atom, kb: KnowledgeBase) -> bool:
    """True when the goal's fulfilment already holds in the agent's own knowledge."""
    fulfilment = agent.fulfilment_of(goal)
    if fulfilment is None:
        return False
    return evaluate(kb, fulfilment) is not None


def identify_goals(society: AgentSociety, ag0: str, strategy: FormationStrategy) -> PartialVO:
    """
    Start a partial VO around the goals ``ag0`` cannot fulfil alone.

    Raises:
        UnknownInitiator: If ``ag0`` is not in the society
        NoUnfulfillableGoals: If the strategy selects no goal
    """
    agent = society.agent(ag0)
    if agent is None:
        raise UnknownInitiator(ag0)

    kb = agent.initial_kb(society.ontology)
    unfulfilled = [g for g in agent.goals if not fulfilled_in_isolation(agent, g, kb)]
    selected = [g for g in strategy.goal_selector.select(agent, unfulfilled) if g in unfulfilled]
    if not selected:
        raise NoUnfulfillableGoals(ag0)

    logger.info("identify_goals: %s needs %s", ag0, ', '.join(str(g) for g in selected))
    return PartialVO(
        stage=Stage.GOALS_IDENTIFIED,
        initiator=ag0,
        agents=(PartialAgent(ag0, (), tuple(selected)),),
        initial_goals=tuple(selected),
        goals=tuple(selected),
    )


def discover_partners(vo: PartialVO, registry: Registry) -> PartialVO:
    """Add every registered provider of a requested service as an empty member."""
    _require_stage(vo, 'discover_partners', Stage.GOALS_IDENTIFIED)
    society = registry.society

    found = set()
    for goal in vo.initial_goals:
        service = requested_service(goal)
        if service is None:
            continue
        for agent_id in query_providers(registry, service):
            if agent_id == vo.initiator or agent_id in vo.ids:
                continue
            spec = society.agent(agent_id)
            if spec is None or not spec.is_provider_of(service):
                logger.debug("Ignoring registry entry %s for %s", agent_id, service)
                continue
            found.add(agent_id)

    added = tuple(PartialAgent(agent_id) for agent_id in sorted(found))
    logger.info("discover_partners: found %s", ', '.join(sorted(found)) or "nobody")
    return vo.evolve(stage=Stage.PARTNERS_DISCOVERED, agents=vo.agents + added)


def select_partners(vo: PartialVO, society: AgentSociety, strategy: FormationStrategy) -> PartialVO:
    """
    Prune discovered partners with the trust filter.

    Raises:
        PruningBrokeCoverage: If some requested service is left without a provider
    """
    _require_stage(vo, 'select_partners', Stage.PARTNERS_DISCOVERED)

    candidates = [i for i in vo.ids if i != vo.initiator]
    kept = set(strategy.trust_filter.prune(candidates, vo.initiator)) & set(candidates)

    for goal in vo.initial_goals:
        service = requested_service(goal)
        if service is None:
            continue
        if not any(society.agent(i).is_provider_of(service) for i in kept):
            raise PruningBrokeCoverage(service)

    agents = tuple(a for a in vo.agents if a.agent_id == vo.initiator or a.agent_id in kept)
    logger.info("select_partners: kept %s", ', '.join(sorted(kept)))
    return vo.evolve(stage=Stage.PARTNERS_SELECTED, agents=agents)


def establish_roles(vo: PartialVO, society: AgentSociety, strategy: FormationStrategy) -> PartialVO:
    """
    Assign roles (and their protocol clauses) to members.

    Raises:
        NoProtocolForRole: If a needed role has no usable clause
        AmbiguousProtocol: If the strategy refuses to pick among several clauses
    """
    _require_stage(vo, 'establish_roles', Stage.PARTNERS_SELECTED)

    members = strategy.role_assigner.assign(vo, society)
    kept = {m.agent_id for m in members}
    missing = [i for i in vo.ids if i not in kept]
    if missing:
        raise FormationError(f"Role assignment dropped selected members: {', '.join(missing)}", 'establish_roles')

    after = vo.evolve(stage=Stage.ROLES_ESTABLISHED, agents=tuple(members))
    after = after.evolve(roles=tuple(after.member_roles()), goals=tuple(after.member_goals()))
    logger.info("establish_roles: %d roles for %d members", len(after.roles), len(after.agents))
    return after


def derive_abstract_workflow(
    goals: Sequence[Atom],
    plan: WorkflowPlan,
    fresh: Optional[FreshVariables] = None,
) -> Tuple[Workflow, List[Tuple[ServiceTerm, ServiceTerm]]]:
    """
    Build the abstract workflow for the requested services.

    Each goal service is unified with its template, if any; otherwise its
    anonymous variables are renamed so the services stay well formed.

    Returns:
        The abstract workflow and, per requested service in goal order,
        the pair (goal service, abstract service)

    Raises:
        FormationError: If no goal requests a service
        NegotiationFailed: If a goal service does not match its template
        ConstraintViolated: If the goals already falsify the annotation
    """
    fresh = fresh or FreshVariables(avoid=variable_names(*goals, *plan.templates))
    subst = EMPTY
    pairs: List[Tuple[ServiceTerm, ServiceTerm]] = []
    for goal in goals:
        service = requested_service(goal)
        if service is None:
            continue
        template = plan.template_for(service.name)
        if template is None:
            pairs.append((service, fresh.rename(service)))
            continue
        extended = unify(service, template, subst)
        if extended is None:
            raise NegotiationFailed(service, f"does not match the template {template}")
        subst = extended
        pairs.append((service, template))

    if not pairs:
        raise FormationError("No requested service to negotiate", 'agree_workflow')

    pairs = [(goal_service, subst.resolve(s)) for goal_service, s in pairs]
    if not plan.annotation.satisfiable(subst):
        raise ConstraintViolated(pairs[0][1], plan.annotation)

    mentioned = variable_names(*(s for _, s in pairs))
    restricted = [c for c in plan.annotation.restrict(subst) if c.variable.name in mentioned]
    workflow = Workflow(tuple(s for _, s in pairs), ConstraintAnnotation(tuple(restricted)))
    return workflow, pairs


@dataclass(frozen=True)
class WorkflowAgreement:
    """Result of workflow negotiation: the new state and every dialogue held."""
    state: PartialVO
    transcripts: Tuple[DialogueTranscript, ...]


def _holders(vo: PartialVO, name: str, service: ServiceTerm) -> List[Tuple[PartialAgent, Role]]:
    """Members holding a ``name`` role bound to ``service``, in id order."""
    return [
        (member, role) for member in vo.agents for role in member.roles
        if role.label.name == name and role.label.parameter is not None
        and is_variant(role.label.parameter, service)
    ]


def _society_role(society: AgentSociety, agent_id: str, role: Role, service: ServiceTerm) -> Role:
    for candidate in society.agent(agent_id).roles_covering(role.label.name, service):
        if candidate.clause.name == role.clause.name:
            return candidate.bind(service)
    raise NoProtocolForRole(role.label, f"{agent_id} cannot play it for {service}")


def _renamed(atoms, fresh: FreshVariables) -> Tuple[Atom, ...]:
    return tuple(fresh.rename(a) for a in atoms)


def _goals_behind(transcript: DialogueTranscript, spec, fresh: FreshVariables) -> List[Atom]:
    """Society goals of the responder that its fired preconditions relied on."""
    guards = [
        atom for firing in transcript.firings_of(transcript.responder)
        for atom in positive_atoms(firing.precondition)
    ]
    return [
        goal for goal in spec.goals
        if any(unify(atom, fresh.rename(goal)) is not None for atom in guards)
    ]


def negotiate_workflow(
    vo: PartialVO,
    society: AgentSociety,
    strategy: FormationStrategy,
    max_steps: int,
    registry: Optional[Registry] = None,
) -> WorkflowAgreement:
    """
    Negotiate one provider per requested service and instantiate the workflow.

    Services are negotiated in goal order; for each, candidate providers are
    tried in id order until one dialogue succeeds (or all of them, when the
    strategy is exhaustive, with the provider chooser picking the winner).

    Args:
        vo: State at RolesEstablished
        society: The agent society
        strategy: Strategies and workflow plan
        max_steps: Message limit per dialogue
        registry: Registry whose facts join the shared ontology

    Returns:
        The WorkflowAgreed state plus every transcript, in the order held

    Raises:
        NegotiationFailed: If no candidate agrees to some service
        ConstraintViolated: If every agreement falsifies the annotation
    """
    _require_stage(vo, 'agree_workflow', Stage.ROLES_ESTABLISHED)

    fresh = FreshVariables(avoid=variable_names(*vo.initial_goals, *strategy.workflow_plan.templates))
    abstract, pairs = derive_abstract_workflow(vo.initial_goals, strategy.workflow_plan, fresh)
    annotation = abstract.annotation

    ontology = society.ontology + (registry.ontology_facts() if registry is not None else ())
    transcripts: List[DialogueTranscript] = []
    chosen: Dict[ServiceTerm, str] = {}
    added_goals: Dict[str, List[Atom]] = {}
    total = EMPTY

    for goal_service, abstract_service in pairs:
        current = total.resolve(abstract_service)
        fresh.avoid(variable_names(current))

        holders = _holders(vo, REQUESTER, goal_service)
        if not holders:
            raise NegotiationFailed(current, "no member holds its requester role")
        requester, requester_role = holders[0]
        requester_spec = society.agent(requester.agent_id)

        request_goal = Atom(BUY, (current,))
        success_goal = requester_spec.fulfilment_of(request_goal)
        if success_goal is None:
            raise NegotiationFailed(current, f"{requester.agent_id} has no fulfilment for {request_goal}")

        requester_kb = KnowledgeBase(
            _renamed(requester_spec.knowledge, fresh)
            + _renamed((g for g in requester_spec.goals if g not in vo.initial_goals), fresh)
            + (request_goal,)
            + _renamed(ontology, fresh)
        )
        requester_play = _society_role(society, requester.agent_id, requester_role, current)

        candidates = [
            (member, role) for member, role in _holders(vo, PROVIDER, goal_service)
            if member.agent_id != requester.agent_id
        ]
        successes: List[Tuple[DialogueTranscript, Substitution]] = []
        rejected = False
        for provider, provider_role in candidates:
            provider_spec = society.agent(provider.agent_id)
            provider_kb = KnowledgeBase(
                _renamed(provider_spec.knowledge.atoms + provider_spec.goals + ontology, fresh)
            )
            try:
                transcript = run_dialogue(
                    requester.agent_id,
                    requester_play,
                    requester_kb,
                    provider.agent_id,
                    _society_role(society, provider.agent_id, provider_role, current),
                    provider_kb,
                    success_goal,
                    max_steps,
                )
            except NonGroundPostcondition as exc:
                logger.warning("Dialogue with %s aborted: %s", provider.agent_id, exc)
                continue
            transcripts.append(transcript)

            if not transcript.succeeded:
                logger.debug("%s did not agree to %s: %s", provider.agent_id, current, transcript.outcome.value)
                continue

            candidate_total = compose_substitutions(total, transcript.substitution)
            if not annotation.satisfiable(candidate_total):
                logger.warning(
                    "Rejected %s for %s: agreement violates %s", provider.agent_id, current, annotation
                )
                rejected = True
                continue

            successes.append((transcript, candidate_total))
            if not strategy.exhaustive:
                break

        if not successes:
            if rejected:
                raise ConstraintViolated(current, annotation)
            raise NegotiationFailed(current, "every dialogue failed" if candidates else "no candidate provider")

        winner = strategy.provider_chooser.choose(current, [t for t, _ in successes])
        total = next(s for t, s in successes if t is winner)
        chosen[goal_service] = winner.responder
        added_goals.setdefault(winner.responder, []).extend(
            _goals_behind(winner, society.agent(winner.responder), fresh)
        )
        logger.debug("%s will provide %s", winner.responder, total.resolve(abstract_service))

    agents = []
    for member in vo.agents:
        provided = [s for s, _ in pairs if any(m.agent_id == member.agent_id for m, _ in _holders(vo, PROVIDER, s))]
        if not provided:
            agents.append(member)
            continue
        unchosen = [s for s in provided if chosen[s] != member.agent_id]
        if len(unchosen) == len(provided):
            logger.debug("Dropping %s: not chosen", member.agent_id)
            continue
        if unchosen:
            raise NegotiationFailed(unchosen[0], f"{member.agent_id} is chosen for another service and holds this role too")
        agents.append(PartialAgent(
            member.agent_id,
            member.roles,
            member.goals + tuple(added_goals.get(member.agent_id, ())),
        ))

    try:
        agreed = abstract.instantiate(total)
    except TermError as exc:
        raise ConstraintViolated(abstract.services[0], annotation) from exc

    after = vo.evolve(stage=Stage.WORKFLOW_AGREED, agents=tuple(agents), abstract_workflow=abstract)
    workflow = strategy.workflow_extender.extend(after, agreed)
    _check_extension(after, agreed, workflow)

    after = after.evolve(
        workflow=workflow,
        goals=tuple(after.member_goals()),
        roles=tuple(after.member_roles()),
    )
    logger.info("agree_workflow: agreed %s", workflow)
    return WorkflowAgreement(after, tuple(transcripts))


def _check_extension(vo: PartialVO, agreed: Workflow, workflow: Workflow) -> None:
    """Extensions may only append concrete services whose roles are already established."""
    base = len(agreed.services)
    if workflow.services[:base] != agreed.services:
        raise FormationError("Workflow extension changed the agreed services", 'agree_workflow')
    labels = {(r.label.name, r.label.service_name) for r in vo.member_roles()}
    for service in workflow.services[base:]:
        established = (REQUESTER, service.name) in labels and (PROVIDER, service.name) in labels
        if not service.is_ground() or not established:
            raise FormationError(
                f"Workflow extension added {service}, which needs a new role", 'agree_workflow'
            )


def agree_workflow(
    vo: PartialVO,
    society: AgentSociety,
    strategy: FormationStrategy,
    max_steps: int,
    registry: Optional[Registry] = None,
) -> PartialVO:
    """``negotiate_workflow`` without the transcripts."""
    return negotiate_workflow(vo, society, strategy, max_steps, registry).state


def _party(vo: PartialVO, name: str, service: ServiceTerm) -> Optional[str]:
    for member in vo.agents:
        for role in member.roles:
            if role.label.name != name or role.label.parameter is None:
                continue
            renamed = FreshVariables(avoid=variable_names(service)).rename(role.label.parameter)
            if unify(renamed, service) is not None:
                return member.agent_id
    return None


def agree_contracts(
    vo: PartialVO,
    society: AgentSociety,
    guarantees: Optional[Mapping[str, Sequence[Formula]]] = None,
    seed: int = 0,
) -> PartialVO:
    """
    Draft and validate one contract per agreed service.

    Guarantee terms are looked up by service name and instantiated with the
    bindings the workflow agreement made.

    Raises:
        ContractInvalid: If a drafted contract fails validation
    """
    _require_stage(vo, 'agree_contracts', Stage.WORKFLOW_AGREED)
    guarantees = guarantees or {}
    workflow = vo.workflow

    base = len(vo.abstract_workflow.services) if vo.abstract_workflow else 0
    bindings = EMPTY
    if vo.abstract_workflow is not None:
        bindings = instance_substitution(
            vo.abstract_workflow, Workflow(workflow.services[:base])
        ) or EMPTY

    contracts: List[Contract] = []
    taken: List[str] = []
    for service in workflow.services:
        requester = _party(vo, REQUESTER, service)
        provider = _party(vo, PROVIDER, service)
        gt = tuple(g.substitute(bindings) for g in guarantees.get(service.name, ()))
        try:
            contract = draft_contract(
                requester or vo.initiator, provider or vo.initiator, service, gt,
                id_seed=seed, initiator=vo.initiator, taken=taken,
            )
        except SameParty as exc:
            report = CheckReport(subject=f"contract for {service}")
            report.add('no-self-dealing', False, str(exc))
            raise ContractInvalid(report) from exc

        report = validate_contract(contract, society)
        if not report.passed:
            raise ContractInvalid(report)
        contracts.append(contract)
        taken.append(contract.cid)

    logger.info("agree_contracts: %d contract(s)", len(contracts))
    return vo.evolve(stage=Stage.CONTRACTS_AGREED, contracts=tuple(contracts))
