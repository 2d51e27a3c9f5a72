"""
Role/goal coherence of an agent.

Every role must have some operation whose precondition mentions one of
the agent's goals, and every goal's fulfilment must appear in the
postcondition of some operation of some role.
"""

from typing import TYPE_CHECKING, List

from voform.core.formulas import Atom, positive_atoms
from voform.core.report import CheckReport
from voform.core.terms import EMPTY, FreshVariables, unify, variable_names
from voform.engines.protocol import ProtocolOperation, Role

if TYPE_CHECKING:
    from voform.society.agents import AgentSpec


def _role_enables_goal(role: Role, goal: Atom) -> bool:
    renamed = role.standardized(FreshVariables(avoid=variable_names(goal)))
    return any(
        unify(atom, goal) is not None
        for op in renamed.clause.operations
        for atom in positive_atoms(op.precondition)
    )


def _operation_achieves(op: ProtocolOperation, wanted: List[Atom]) -> bool:
    produced = positive_atoms(op.postcondition)
    subst = EMPTY
    for atom in wanted:
        for candidate in produced:
            extended = unify(candidate, atom, subst)
            if extended is not None:
                subst = extended
                break
        else:
            return False
    return True


def check_role_goal_coherence(agent: 'AgentSpec') -> CheckReport:
    """
    Check both directions of role/goal coherence for ``agent``.

    Returns:
        A report with one ``role-enables-goal`` check per role and one
        ``goal-fulfilled-by-role`` check per goal
    """
    report = CheckReport(subject=f"coherence of {agent.agent_id}")

    for role in agent.roles:
        enabled = [g for g in agent.goals if _role_enables_goal(role, g)]
        report.add(
            'role-enables-goal',
            bool(enabled),
            f"enables {enabled[0]}" if enabled else "no operation precondition mentions a goal",
            subject=str(role),
        )

    for goal in agent.goals:
        fulfilment = agent.fulfilment_of(goal)
        if fulfilment is None:
            report.add('goal-fulfilled-by-role', False, "no fulfilment pairing", subject=str(goal))
            continue
        wanted = positive_atoms(fulfilment)
        achieved = False
        for role in agent.roles:
            renamed = role.standardized(FreshVariables(avoid=variable_names(fulfilment)))
            if any(_operation_achieves(op, wanted) for op in renamed.clause.operations):
                achieved = True
                break
        report.add(
            'goal-fulfilled-by-role',
            achieved,
            f"fulfilled by {fulfilment}" if achieved else f"no role can bring about {fulfilment}",
            subject=str(goal),
        )

    return report
