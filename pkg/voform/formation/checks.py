"""
Independent re-checking of formation transitions.

``validate_transition`` judges a (before, after) pair of partial VOs
against the constraints of one transition. It works from the states alone
(plus the dialogue transcripts for workflow agreement) and never calls
into the transition code, so it can audit saved traces and catch tampered
states.
"""

from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from voform.contracts.contract import validate_contract
from voform.core.report import CheckReport
from voform.core.terms import (
    FreshVariables,
    ServiceTerm,
    Variable,
    is_variant,
    subsumes,
    unify,
    variable_names,
)
from voform.core.workflow import Workflow, instance_substitution
from voform.engines.dialogue import DialogueTranscript
from voform.engines.knowledge import evaluate
from voform.engines.protocol import PROVIDER, REQUESTER, Role
from voform.formation.partial_vo import PartialAgent, PartialVO, Stage
from voform.society.society import AgentSociety


STAGES: Dict[str, Tuple[Stage, Stage]] = {
    'identify_goals': (Stage.EMPTY, Stage.GOALS_IDENTIFIED),
    'discover_partners': (Stage.GOALS_IDENTIFIED, Stage.PARTNERS_DISCOVERED),
    'select_partners': (Stage.PARTNERS_DISCOVERED, Stage.PARTNERS_SELECTED),
    'establish_roles': (Stage.PARTNERS_SELECTED, Stage.ROLES_ESTABLISHED),
    'agree_workflow': (Stage.ROLES_ESTABLISHED, Stage.WORKFLOW_AGREED),
    'agree_contracts': (Stage.WORKFLOW_AGREED, Stage.CONTRACTS_AGREED),
}


def _goal_services(vo: PartialVO) -> List[ServiceTerm]:
    services = []
    for goal in vo.initial_goals:
        if goal.predicate == 'toBuy' and len(goal.args) == 1 and isinstance(goal.args[0], ServiceTerm):
            services.append(goal.args[0])
    return services


def _same_members(left: Iterable[PartialAgent], right: Iterable[PartialAgent]) -> bool:
    return sorted(left, key=lambda a: a.agent_id) == sorted(right, key=lambda a: a.agent_id)


def _role_holders(vo: PartialVO, name: str, service: ServiceTerm) -> List[Tuple[str, Role]]:
    return [
        (member.agent_id, role) for member in vo.agents for role in member.roles
        if role.label.name == name and role.label.parameter is not None
        and is_variant(role.label.parameter, service)
    ]


def _label_matches(label_parameter, service) -> bool:
    renamed = FreshVariables(avoid=variable_names(service)).rename(label_parameter)
    return unify(renamed, service) is not None


def _ids(names: Iterable[str]) -> str:
    return ', '.join(sorted(names)) or "none"


def _check_common(report: CheckReport, before: PartialVO, after: PartialVO, kind: str,
                  society: AgentSociety) -> None:
    expected_before, expected_after = STAGES[kind]
    report.add(
        'stage-advances',
        before.stage is expected_before and after.stage is expected_after,
        f"{before.stage.value} -> {after.stage.value}",
    )

    problems = []
    for member in after.agents:
        spec = society.agent(member.agent_id)
        if spec is None:
            problems.append(f"{member.agent_id} is not in the society")
            continue
        for role in member.roles:
            if not any(role.is_instance_of(general) for general in spec.roles):
                problems.append(f"{member.agent_id} cannot play {role}")
        for goal in member.goals:
            if goal not in spec.goals:
                problems.append(f"{member.agent_id} does not hold goal {goal}")
    report.add('members-are-partial-agents', not problems, '; '.join(problems))

    if after.stage >= Stage.GOALS_IDENTIFIED:
        initiator = society.agent(after.initiator) if after.initiator else None
        shared = initiator is not None and any(g in initiator.goals for g in after.goals)
        report.add('initiator-shares-goals', shared, f"initiator {after.initiator}")

    member_goals = {g for a in after.agents for g in a.goals}
    report.add('goals-union', set(after.goals) == member_goals, "organisation goals equal member goals")
    member_roles = {r for a in after.agents for r in a.roles}
    report.add('roles-union', set(after.roles) == member_roles, "organisation roles equal member roles")

    if after.stage is Stage.CONTRACTS_AGREED:
        report.add('at-least-two-agents', len(after.agents) >= 2, f"{len(after.agents)} member(s)")


def _check_identify_goals(report: CheckReport, before: PartialVO, after: PartialVO,
                          society: AgentSociety) -> None:
    report.add('before-empty', not before.agents and not before.goals, "")

    only = len(after.agents) == 1 and after.agents[0].agent_id == after.initiator
    report.add('single-initiator-member', only, _ids(after.ids))
    report.add('goals-nonempty', bool(after.initial_goals), f"{len(after.initial_goals)} goal(s)")

    agent = society.agent(after.initiator) if after.initiator else None
    from_initiator = (
        agent is not None
        and set(after.initial_goals) == set(after.goals)
        and all(g in agent.goals for g in after.goals)
    )
    report.add('goals-from-initiator', from_initiator, "")

    fulfilled = []
    if agent is not None:
        kb = agent.initial_kb(society.ontology)
        for goal in after.initial_goals:
            fulfilment = agent.fulfilment_of(goal)
            if fulfilment is not None and evaluate(kb, fulfilment) is not None:
                fulfilled.append(str(goal))
    report.add(
        'goals-unfulfillable',
        not fulfilled,
        "already fulfilled: " + ', '.join(fulfilled) if fulfilled else "",
    )
    report.add('no-roles-yet', not after.roles and not any(a.roles for a in after.agents), "")


def _check_discover_partners(report: CheckReport, before: PartialVO, after: PartialVO,
                             society: AgentSociety) -> None:
    before_ids = set(before.ids)
    report.add('initiator-kept', all(after.member(a.agent_id) == a for a in before.agents), "")

    added = [a for a in after.agents if a.agent_id not in before_ids]
    report.add(
        'added-members-empty',
        all(not a.roles and not a.goals for a in added),
        _ids(a.agent_id for a in added),
    )

    services = _goal_services(after)
    not_providers = [
        a.agent_id for a in added
        if society.agent(a.agent_id) is None
        or not any(society.agent(a.agent_id).is_provider_of(s) for s in services)
    ]
    report.add(
        'added-members-are-providers',
        not not_providers,
        "not providers: " + _ids(not_providers) if not_providers else "",
    )
    report.add('initiator-not-rediscovered', list(after.ids).count(after.initiator) == 1, "")
    report.add(
        'goals-unchanged',
        after.goals == before.goals and after.initial_goals == before.initial_goals,
        "",
    )


def _check_select_partners(report: CheckReport, before: PartialVO, after: PartialVO,
                           society: AgentSociety) -> None:
    report.add(
        'subset-of-discovered',
        all(before.member(a.agent_id) == a for a in after.agents),
        _ids(after.ids),
    )
    report.add('initiator-kept', after.member(after.initiator) == before.member(before.initiator), "")

    uncovered = [
        str(s) for s in _goal_services(after)
        if not any(
            a.agent_id != after.initiator and society.agent(a.agent_id) is not None
            and society.agent(a.agent_id).is_provider_of(s)
            for a in after.agents
        )
    ]
    report.add('provider-coverage', not uncovered, "uncovered: " + ', '.join(uncovered) if uncovered else "")
    report.add('goals-unchanged', after.goals == before.goals, "")


def _check_establish_roles(report: CheckReport, before: PartialVO, after: PartialVO,
                           society: AgentSociety) -> None:
    report.add('selected-kept', set(before.ids) <= set(after.ids), _ids(after.ids))

    for service in _goal_services(after):
        for name, check in ((REQUESTER, 'one-requester-per-goal'), (PROVIDER, 'one-provider-per-goal')):
            roles = [
                r for r in after.roles
                if r.label.name == name and r.label.parameter is not None
                and is_variant(r.label.parameter, service)
            ]
            clauses = {r.clause.name for r in roles}
            report.add(check, len(clauses) == 1, f"{len(clauses)} clause(s)", subject=f"{name}({service})")

    clashes = []
    roles = list(after.roles)
    for i, first in enumerate(roles):
        for second in roles[i + 1:]:
            same_label = (
                first.label.name == second.label.name
                and (first.label.parameter is None) == (second.label.parameter is None)
                and (first.label.parameter is None or is_variant(first.label.parameter, second.label.parameter))
            )
            if same_label and first.clause.name != second.clause.name:
                clashes.append(f"{first.label}: {first.clause.name} / {second.clause.name}")
    report.add('labels-map-to-unique-clauses', not clashes, '; '.join(clashes))
    report.add('goals-kept', set(before.goals) <= set(after.goals), "")


def _check_agree_workflow(report: CheckReport, before: PartialVO, after: PartialVO,
                          society: AgentSociety,
                          transcripts: Optional[Sequence[DialogueTranscript]]) -> None:
    changed_roles = [
        a.agent_id for a in after.agents
        if before.member(a.agent_id) is None or before.member(a.agent_id).roles != a.roles
    ]
    report.add('roles-unchanged', not changed_roles, _ids(changed_roles) if changed_roles else "")
    report.add('members-subset', set(after.ids) <= set(before.ids), _ids(after.ids))

    shrunk = [
        a.agent_id for a in after.agents
        if before.member(a.agent_id) is not None
        and not set(before.member(a.agent_id).goals) <= set(a.goals)
    ]
    report.add('goals-only-grow', not shrunk, "goals removed from " + _ids(shrunk) if shrunk else "")
    report.add(
        'initial-goals-kept',
        after.initial_goals == before.initial_goals and set(after.initial_goals) <= set(after.goals),
        "",
    )

    providers: Dict[ServiceTerm, str] = {}
    for service in _goal_services(after):
        holders = {agent_id for agent_id, _ in _role_holders(after, PROVIDER, service)}
        report.add(
            'single-provider-per-goal', len(holders) == 1, _ids(holders), subject=str(service)
        )
        if len(holders) == 1:
            providers[service] = holders.pop()

    if transcripts is not None:
        for service in _goal_services(after):
            provider = providers.get(service)
            requesters = {agent_id for agent_id, _ in _role_holders(after, REQUESTER, service)}
            agreed = provider is not None and any(
                t.succeeded and t.responder == provider and t.initiator in requesters
                for t in transcripts
            )
            report.add(
                'successful-dialogue-per-goal', agreed, f"provider {provider}", subject=str(service)
            )

    abstract, workflow = after.abstract_workflow, after.workflow
    report.add('workflow-present', abstract is not None and workflow is not None, "")
    if abstract is None or workflow is None:
        return

    underived = [
        str(s) for s in _goal_services(after)
        if not any(a.name == s.name and subsumes(s, a) for a in abstract.services)
    ]
    report.add(
        'abstract-derived-from-goals',
        not underived,
        "no abstract service for " + ', '.join(underived) if underived else "",
    )

    base = len(abstract.services)
    bindings = None
    if len(workflow.services) >= base:
        bindings = instance_substitution(abstract, Workflow(workflow.services[:base]))
    labels = {(r.label.name, r.label.service_name) for r in after.roles}
    extras_ok = all(
        s.is_ground() and (REQUESTER, s.name) in labels and (PROVIDER, s.name) in labels
        for s in workflow.services[base:]
    )
    instance = (
        bindings is not None and extras_ok
        and all(subsumes(a, w) for a, w in zip(abstract.services, workflow.services))
    )
    report.add('workflow-instance-of-abstract', instance, str(workflow))

    satisfied = bindings is not None and abstract.annotation.satisfiable(bindings) \
        and workflow.annotation.satisfiable()
    report.add('annotation-satisfied', satisfied, str(abstract.annotation))

    if transcripts is not None and bindings is not None:
        successes = [t for t in transcripts if t.succeeded and t.substitution is not None]
        unexplained = []
        for name in sorted(variable_names(*abstract.services)):
            value = bindings.resolve(Variable(name))
            if value == Variable(name):
                continue
            if not any(t.substitution.resolve(Variable(name)) == value for t in successes):
                unexplained.append(f"{name}={value}")
        report.add(
            'workflow-bindings-from-dialogues',
            not unexplained,
            "not agreed in any dialogue: " + ', '.join(unexplained) if unexplained else "",
        )


def _check_agree_contracts(report: CheckReport, before: PartialVO, after: PartialVO,
                           society: AgentSociety) -> None:
    report.add('members-unchanged', _same_members(before.agents, after.agents), "")
    report.add('goals-unchanged', set(before.goals) == set(after.goals), "")
    report.add('roles-unchanged', set(before.roles) == set(after.roles), "")
    report.add('workflow-unchanged', before.workflow == after.workflow, "")

    workflow = after.workflow
    services = workflow.services if workflow is not None else ()
    for service in services:
        covering = [c.cid for c in after.contracts if service in c.sdt.services]
        report.add('contract-per-service', len(covering) == 1, _ids(covering), subject=str(service))
    report.add(
        'contract-count',
        len(after.contracts) == len(services),
        f"{len(after.contracts)} contract(s) for {len(services)} service(s)",
    )

    for contract in after.contracts:
        contract_report = validate_contract(contract, society)
        report.add(
            'contracts-valid', contract_report.passed,
            ', '.join(contract_report.failed_names()), subject=contract.cid,
        )

    cids = [c.cid for c in after.contracts]
    report.add('contract-ids-unique', len(cids) == len(set(cids)), "")

    strangers: Set[str] = set()
    for contract in after.contracts:
        for entry in contract.context:
            member = after.member(entry.agent_id)
            if member is None:
                strangers.add(entry.agent_id)
                continue
            for label in entry.roles:
                plays = any(
                    role.label.name == label.name and role.label.parameter is not None
                    and label.parameter is not None
                    and _label_matches(role.label.parameter, label.parameter)
                    for role in member.roles
                )
                if not plays:
                    strangers.add(f"{entry.agent_id}:{label}")
    report.add(
        'contract-parties-are-members',
        not strangers,
        "not backed by an organisation role: " + _ids(strangers) if strangers else "",
    )


def validate_transition(
    before: PartialVO,
    after: PartialVO,
    kind: str,
    society: AgentSociety,
    transcripts: Optional[Sequence[DialogueTranscript]] = None,
) -> CheckReport:
    """
    Re-check every constraint of one transition on a (before, after) pair.

    Args:
        before: State the transition started from
        after: State it produced
        kind: Transition name, e.g. ``agree_workflow``
        society: The society the states refer to
        transcripts: Dialogues held by the transition, when it held any

    Returns:
        A report listing each constraint with pass/fail; it never raises
    """
    report = CheckReport(subject=kind)
    if kind not in STAGES:
        report.add('known-transition', False, f"unknown transition {kind}")
        return report

    try:
        _check_common(report, before, after, kind, society)
        if kind == 'identify_goals':
            _check_identify_goals(report, before, after, society)
        elif kind == 'discover_partners':
            _check_discover_partners(report, before, after, society)
        elif kind == 'select_partners':
            _check_select_partners(report, before, after, society)
        elif kind == 'establish_roles':
            _check_establish_roles(report, before, after, society)
        elif kind == 'agree_workflow':
            _check_agree_workflow(report, before, after, society, transcripts)
        else:
            _check_agree_contracts(report, before, after, society)
    except Exception as exc:  # malformed states
        report.add('state-well-formed', False, f"{type(exc).__name__}: {exc}")

    return report


def validate_state(vo: PartialVO, society: AgentSociety) -> CheckReport:
    """Stage-independent invariants of a single state."""
    report = CheckReport(subject=f"state at {vo.stage.value}")
    problems = []
    for member in vo.agents:
        spec = society.agent(member.agent_id)
        if spec is None:
            problems.append(f"{member.agent_id} is not in the society")
            continue
        if not all(any(r.is_instance_of(g) for g in spec.roles) for r in member.roles):
            problems.append(f"{member.agent_id} plays a role it does not hold")
        if not all(g in spec.goals for g in member.goals):
            problems.append(f"{member.agent_id} has a goal it does not hold")
    report.add('members-are-partial-agents', not problems, '; '.join(problems))
    report.add('goals-union', set(vo.goals) == {g for a in vo.agents for g in a.goals}, "")
    report.add('roles-union', set(vo.roles) == {r for a in vo.agents for r in a.roles}, "")
    if vo.stage >= Stage.GOALS_IDENTIFIED:
        initiator = society.agent(vo.initiator) if vo.initiator else None
        report.add(
            'initiator-shares-goals',
            initiator is not None and any(g in initiator.goals for g in vo.goals),
            "",
        )
    if vo.stage is Stage.CONTRACTS_AGREED:
        report.add('at-least-two-agents', len(vo.agents) >= 2, "")
        for contract in vo.contracts:
            report.add('contracts-valid', validate_contract(contract, society).passed, subject=contract.cid)
    return report
