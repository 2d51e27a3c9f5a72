"""Per-run formation settings, as declared by a scenario and refined by the CLI."""

from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple

from voform.config.manager import FormationDefaults
from voform.core.constraints import ConstraintAnnotation
from voform.core.formulas import Atom, Formula
from voform.core.terms import ServiceTerm


BUY = 'toBuy'


def requested_service(goal: Atom) -> Optional[ServiceTerm]:
    """The service ``s`` of a ``toBuy(s)`` goal, or None for other goals."""
    if goal.predicate == BUY and len(goal.args) == 1 and isinstance(goal.args[0], ServiceTerm):
        return goal.args[0]
    return None


@dataclass(frozen=True)
class FormationSettings:
    """
    Everything a formation run needs beyond the society and registry.

    ``None`` for the numeric knobs means "use the configured default".
    Mapping-valued settings are stored as sorted tuples of pairs.
    """
    initiator: str
    request: Optional[Atom] = None
    allow: Optional[Tuple[str, ...]] = None
    deny: Tuple[str, ...] = ()
    role_choice: Optional[str] = None
    clause_choices: Tuple[Tuple[str, str], ...] = ()
    delegates: Tuple[Tuple[str, str], ...] = ()
    templates: Tuple[ServiceTerm, ...] = ()
    annotation: ConstraintAnnotation = field(default_factory=ConstraintAnnotation)
    guarantees: Tuple[Tuple[str, Tuple[Formula, ...]], ...] = ()
    provider_choice: str = "first"
    max_dialogue_steps: Optional[int] = None
    seed: Optional[int] = None
    exhaustive_negotiation: Optional[bool] = None

    def __post_init__(self):
        object.__setattr__(self, 'clause_choices', tuple(sorted(self.clause_choices)))
        object.__setattr__(self, 'delegates', tuple(sorted(self.delegates)))
        object.__setattr__(self, 'guarantees', tuple(sorted(self.guarantees)))

    def clause_choice(self, role_name: str, service_name: str) -> Optional[str]:
        return dict(self.clause_choices).get(f"{role_name}({service_name})")

    def delegate_for(self, service_name: str) -> Optional[str]:
        return dict(self.delegates).get(service_name)

    def template_for(self, service_name: str) -> Optional[ServiceTerm]:
        for template in self.templates:
            if template.name == service_name:
                return template
        return None

    def guarantees_by_service(self) -> Dict[str, Tuple[Formula, ...]]:
        return dict(self.guarantees)

    def resolved(
        self,
        defaults: FormationDefaults,
        seed: Optional[int] = None,
        max_dialogue_steps: Optional[int] = None,
    ) -> 'FormationSettings':
        """
        Fill unset knobs from ``defaults``; explicit arguments win over both.
        """
        return replace(
            self,
            role_choice=self.role_choice or defaults.role_choice,
            max_dialogue_steps=(
                max_dialogue_steps if max_dialogue_steps is not None
                else self.max_dialogue_steps if self.max_dialogue_steps is not None
                else defaults.max_dialogue_steps
            ),
            seed=(
                seed if seed is not None
                else self.seed if self.seed is not None
                else defaults.seed
            ),
            exhaustive_negotiation=(
                self.exhaustive_negotiation if self.exhaustive_negotiation is not None
                else defaults.exhaustive_negotiation
            ),
        )
