"""Agent specifications: roles, goals, private knowledge and goal pairings."""

from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Tuple

from voform.core.formulas import Atom, Formula
from voform.core.terms import FreshVariables, Term, unify, variable_names
from voform.engines.knowledge import KnowledgeBase
from voform.engines.protocol import PROVIDER, REQUESTER, Role


@dataclass(frozen=True)
class GoalPairing:
    """States that ``goal`` is fulfilled once ``fulfilled_by`` holds, e.g. toBuy(S) -> bought(S)."""

    goal: Atom
    fulfilled_by: Formula

    def fulfilment_of(self, goal: Atom) -> Optional[Formula]:
        renaming = FreshVariables(avoid=variable_names(goal)).renaming(self.goal, self.fulfilled_by)
        subst = unify(self.goal.substitute(renaming), goal)
        if subst is None:
            return None
        return self.fulfilled_by.substitute(renaming).substitute(subst)

    def __str__(self) -> str:
        return f"{self.goal} -> {self.fulfilled_by}"


@dataclass(frozen=True)
class Decomposition:
    """Breaks a requested task into sub-goals."""

    head: Atom
    subgoals: Tuple[Atom, ...]

    def expand(self, request: Atom) -> Optional[Tuple[Atom, ...]]:
        renaming = FreshVariables(avoid=variable_names(request)).renaming(self.head, *self.subgoals)
        subst = unify(self.head.substitute(renaming), request)
        if subst is None:
            return None
        return tuple(g.substitute(renaming).substitute(subst) for g in self.subgoals)

    def __str__(self) -> str:
        return f"{self.head} -> " + ', '.join(str(g) for g in self.subgoals)


@dataclass(frozen=True)
class AgentSpec:
    """
    Society-level description of an agent.

    Roles and goals keep their declared order.
    """

    agent_id: str
    roles: Tuple[Role, ...]
    goals: Tuple[Atom, ...]
    knowledge: KnowledgeBase = field(default_factory=KnowledgeBase)
    fulfilments: Tuple[GoalPairing, ...] = ()
    decompositions: Tuple[Decomposition, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'roles', tuple(dict.fromkeys(self.roles)))
        object.__setattr__(self, 'goals', tuple(dict.fromkeys(self.goals)))
        object.__setattr__(self, 'fulfilments', tuple(self.fulfilments))
        object.__setattr__(self, 'decompositions', tuple(self.decompositions))

    def fulfilment_of(self, goal: Atom) -> Optional[Formula]:
        """The formula that fulfils ``goal``, from the first matching pairing."""
        for pairing in self.fulfilments:
            fulfilment = pairing.fulfilment_of(goal)
            if fulfilment is not None:
                return fulfilment
        return None

    def initial_kb(self, extra: Iterable[Atom] = ()) -> KnowledgeBase:
        return KnowledgeBase(self.knowledge.atoms + self.goals + tuple(extra))

    def roles_covering(self, name: str, service: Term) -> List[Role]:
        return [r for r in self.roles if r.covers(name, service)]

    def is_provider_of(self, service: Term) -> bool:
        return bool(self.roles_covering(PROVIDER, service))

    def is_requester_of(self, service: Term) -> bool:
        return bool(self.roles_covering(REQUESTER, service))

    def expand_request(self, request: Atom) -> Optional[Tuple[Atom, ...]]:
        for decomposition in self.decompositions:
            subgoals = decomposition.expand(request)
            if subgoals is not None:
                return subgoals
        return None
