"""
Deterministic two-party dialogue scheduler.

The initiator moves first and the parties alternate turns. On its turn an
agent fires the earliest receive operation matching the head of its inbox
(if any), then the earliest enabled send operation (if any). Each send
delivers one message and counts as one step. A send operation instance
fires at most once per dialogue.

The dialogue ends with:

- Success once the success goal holds in the initiator's knowledge base
- Failure when a turn fires nothing
- StepLimitExceeded when a send would exceed the step limit
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from voform.core.formulas import Formula
from voform.core.syntax import parse_formula, parse_locution, parse_role_label, parse_term
from voform.core.terms import (
    EMPTY,
    Constant,
    FreshVariables,
    Substitution,
    unify,
    variable_names,
)
from voform.engines.knowledge import KnowledgeBase, apply_postcondition, solutions
from voform.engines.protocol import (
    Direction,
    Locution,
    ProtocolOperation,
    Role,
    RoleLabel,
    unify_labels,
    unify_locutions,
)
from voform.utils.logger import get_logger

logger = get_logger(__name__)


class DialogueOutcome(Enum):
    SUCCESS = "Success"
    FAILURE = "Failure"
    STEP_LIMIT_EXCEEDED = "StepLimitExceeded"


@dataclass(frozen=True)
class InboxMessage:
    """A delivered message waiting to be received."""
    locution: Locution
    sender: str
    sender_role: RoleLabel


@dataclass(frozen=True)
class DialogueStep:
    """One message: a send by one party and the matching receive by the other."""
    sender: str
    sender_role: RoleLabel
    receiver: str
    receiver_role: RoleLabel
    locution: Locution

    def to_dict(self) -> Dict[str, str]:
        return {
            'from': self.sender,
            'from_role': str(self.sender_role),
            'to': self.receiver,
            'to_role': str(self.receiver_role),
            'locution': str(self.locution),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, str]) -> 'DialogueStep':
        return cls(
            sender=data['from'],
            sender_role=parse_role_label(data['from_role']),
            receiver=data['to'],
            receiver_role=parse_role_label(data['to_role']),
            locution=parse_locution(data['locution']),
        )

    def __str__(self) -> str:
        return f"{self.sender} ({self.sender_role}) -> {self.receiver} ({self.receiver_role}): {self.locution}"


@dataclass(frozen=True)
class Firing:
    """An operation an agent fired, with its instantiated precondition."""
    agent: str
    index: int
    direction: Direction
    precondition: Formula
    action: str

    def to_dict(self) -> Dict[str, Any]:
        return {
            'agent': self.agent,
            'index': self.index,
            'direction': self.direction.value,
            'precondition': str(self.precondition),
            'action': self.action,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Firing':
        return cls(
            agent=data['agent'],
            index=int(data['index']),
            direction=Direction(data['direction']),
            precondition=parse_formula(data['precondition']),
            action=data['action'],
        )


@dataclass(frozen=True)
class EnabledOperation:
    index: int
    operation: ProtocolOperation
    substitution: Substitution


@dataclass(frozen=True)
class DialogueTranscript:
    """Complete record of one dialogue."""
    initiator: str
    responder: str
    steps: Tuple[DialogueStep, ...]
    outcome: DialogueOutcome
    substitution: Optional[Substitution] = None
    reason: str = ""
    firings: Tuple[Firing, ...] = ()
    final_knowledge: Tuple[Tuple[str, KnowledgeBase], ...] = ()

    @property
    def succeeded(self) -> bool:
        return self.outcome is DialogueOutcome.SUCCESS

    def firings_of(self, agent: str) -> List[Firing]:
        return [f for f in self.firings if f.agent == agent]

    def knowledge_of(self, agent: str) -> Optional[KnowledgeBase]:
        for agent_id, kb in self.final_knowledge:
            if agent_id == agent:
                return kb
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'initiator': self.initiator,
            'responder': self.responder,
            'outcome': self.outcome.value,
            'reason': self.reason,
            'substitution': self.substitution.to_dict() if self.substitution is not None else None,
            'steps': [s.to_dict() for s in self.steps],
            'firings': [f.to_dict() for f in self.firings],
            'final_knowledge': {
                agent_id: [str(a) for a in kb] for agent_id, kb in self.final_knowledge
            },
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'DialogueTranscript':
        subst = data.get('substitution')
        return cls(
            initiator=data['initiator'],
            responder=data['responder'],
            steps=tuple(DialogueStep.from_dict(s) for s in data.get('steps', [])),
            outcome=DialogueOutcome(data['outcome']),
            substitution=(
                Substitution({k: parse_term(v) for k, v in subst.items()})
                if subst is not None else None
            ),
            reason=data.get('reason', ''),
            firings=tuple(Firing.from_dict(f) for f in data.get('firings', [])),
            final_knowledge=tuple(
                (agent_id, KnowledgeBase(tuple(parse_formula(a) for a in atoms)))
                for agent_id, atoms in data.get('final_knowledge', {}).items()
            ),
        )


def _match_message(op: ProtocolOperation, message: InboxMessage) -> Optional[Substitution]:
    subst = unify_locutions(op.locution, message.locution, EMPTY)
    if subst is None:
        return None
    subst = unify(op.partner, Constant(message.sender), subst)
    if subst is None:
        return None
    return unify_labels(op.partner_role, message.sender_role, subst)


def firing_key(index: int, op: ProtocolOperation, subst: Substitution) -> Tuple[int, str, str]:
    """Identity of an operation instance for refraction."""
    return (index, str(op.locution.substitute(subst)), str(subst.resolve(op.partner)))


def enabled_operations(
    kb: KnowledgeBase,
    role: Role,
    pending: Sequence[InboxMessage] = (),
    partner: Optional[str] = None,
    fired: FrozenSet[Tuple[int, str, str]] = frozenset(),
) -> List[EnabledOperation]:
    """
    Operations of ``role`` enabled in ``kb``, in declaration order.

    A receive is enabled only when the head of ``pending`` unifies with
    its locution, partner and partner role. When ``partner`` is given, a
    send is enabled only towards that agent. Send instances listed in
    ``fired`` are skipped.

    Returns:
        One ``EnabledOperation`` per enabled operation, carrying the
        first substitution that enables it
    """
    head = pending[0] if pending else None
    enabled = []

    for index, op in enumerate(role.clause.operations):
        if op.direction is Direction.RECEIVE:
            if head is None:
                continue
            start = _match_message(op, head)
        elif partner is not None:
            start = unify(op.partner, Constant(partner))
        else:
            start = EMPTY
        if start is None:
            continue

        for subst in solutions(kb, op.precondition, start):
            if op.direction is Direction.SEND and firing_key(index, op, subst) in fired:
                continue
            enabled.append(EnabledOperation(index, op, subst))
            break

    return enabled


@dataclass
class _Party:
    agent_id: str
    role: Role
    kb: KnowledgeBase
    inbox: List[InboxMessage] = field(default_factory=list)
    fired: Set[Tuple[int, str, str]] = field(default_factory=set)


def _standardize_role(role: Role, fresh: FreshVariables, keep: Set[str]) -> Role:
    renaming = fresh.renaming(role)
    bindings = {name: term for name, term in renaming.items() if name not in keep}
    return role.substitute(Substitution(bindings))


def run_dialogue(
    initiator: str,
    initiator_role: Role,
    initiator_kb: KnowledgeBase,
    responder: str,
    responder_role: Role,
    responder_kb: KnowledgeBase,
    success_goal: Formula,
    max_steps: int,
) -> DialogueTranscript:
    """
    Run a dialogue between two agents until success, failure or the step limit.

    Variables of the roles that do not occur in ``success_goal`` are renamed
    apart from both knowledge bases before the dialogue starts.

    Args:
        initiator: Agent that moves first and whose KB decides success
        initiator_role: Role the initiator plays
        initiator_kb: Initiator's private knowledge base
        responder: The other agent
        responder_role: Role the responder plays
        responder_kb: Responder's private knowledge base
        success_goal: Formula that ends the dialogue successfully
        max_steps: Maximum number of messages

    Returns:
        The dialogue transcript
    """
    if initiator == responder:
        raise ValueError(f"An agent cannot hold a dialogue with itself: {initiator}")

    keep = variable_names(success_goal)
    fresh = FreshVariables(
        avoid=variable_names(initiator_role, responder_role, initiator_kb, responder_kb, success_goal)
    )
    parties = {
        initiator: _Party(initiator, _standardize_role(initiator_role, fresh, keep), initiator_kb),
        responder: _Party(responder, _standardize_role(responder_role, fresh, keep), responder_kb),
    }
    other = {initiator: responder, responder: initiator}
    steps: List[DialogueStep] = []
    firings: List[Firing] = []

    logger.debug(
        "Dialogue %s (%s) <-> %s (%s), goal %s",
        initiator, initiator_role.label, responder, responder_role.label, success_goal,
    )

    def finish(outcome: DialogueOutcome, subst: Optional[Substitution] = None, reason: str = ""):
        logger.debug("Dialogue %s <-> %s ended: %s %s", initiator, responder, outcome.value, reason)
        return DialogueTranscript(
            initiator=initiator,
            responder=responder,
            steps=tuple(steps),
            outcome=outcome,
            substitution=subst.restricted(sorted(keep)) if subst is not None else None,
            reason=reason,
            firings=tuple(firings),
            final_knowledge=tuple((p.agent_id, p.kb) for p in parties.values()),
        )

    def success() -> Optional[Substitution]:
        return next(solutions(parties[initiator].kb, success_goal), None)

    active = initiator
    while True:
        party = parties[active]
        peer = parties[other[active]]

        achieved = success()
        if achieved is not None:
            return finish(DialogueOutcome.SUCCESS, achieved)

        fired_any = False

        if party.inbox:
            receives = [
                e for e in enabled_operations(party.kb, party.role, party.inbox)
                if e.operation.direction is Direction.RECEIVE
            ]
            if receives:
                chosen = receives[0]
                message = party.inbox.pop(0)
                party.kb = apply_postcondition(
                    party.kb, chosen.operation.postcondition, chosen.substitution, keep
                )
                firings.append(_firing(party.agent_id, chosen))
                fired_any = True
                logger.debug("%s received %s from %s", party.agent_id, message.locution, message.sender)

                achieved = success()
                if achieved is not None:
                    return finish(DialogueOutcome.SUCCESS, achieved)
            else:
                logger.warning(
                    "%s cannot receive %s from %s", party.agent_id,
                    party.inbox[0].locution, party.inbox[0].sender,
                )

        sends = enabled_operations(
            party.kb, party.role, (), partner=peer.agent_id, fired=frozenset(party.fired)
        )
        sends = [e for e in sends if e.operation.direction is Direction.SEND]
        if sends:
            if len(steps) >= max_steps:
                return finish(
                    DialogueOutcome.STEP_LIMIT_EXCEEDED,
                    reason=f"{party.agent_id} would exceed {max_steps} messages",
                )
            chosen = sends[0]
            op, subst = chosen.operation, chosen.substitution
            locution = op.locution.substitute(subst)
            step = DialogueStep(
                sender=party.agent_id,
                sender_role=party.role.label.substitute(subst),
                receiver=peer.agent_id,
                receiver_role=op.partner_role.substitute(subst),
                locution=locution,
            )
            steps.append(step)
            peer.inbox.append(InboxMessage(locution, party.agent_id, step.sender_role))
            party.kb = apply_postcondition(party.kb, op.postcondition, subst, keep)
            party.fired.add(firing_key(chosen.index, op, subst))
            firings.append(_firing(party.agent_id, chosen))
            fired_any = True
            logger.debug("Step %d: %s", len(steps), step)

        if not fired_any:
            return finish(
                DialogueOutcome.FAILURE,
                reason=f"{party.agent_id} has no enabled operation",
            )

        active = peer.agent_id


def _firing(agent_id: str, enabled: EnabledOperation) -> Firing:
    op, subst = enabled.operation, enabled.substitution
    return Firing(
        agent=agent_id,
        index=enabled.index,
        direction=op.direction,
        precondition=op.precondition.substitute(subst),
        action=op.substitute(subst).action,
    )
