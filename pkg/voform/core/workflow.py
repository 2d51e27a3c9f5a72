"""Workflows: non-empty service sets with a constraint annotation."""

from dataclasses import dataclass, field
from typing import Iterable, Tuple

from voform.core.constraints import ConstraintAnnotation
from voform.core.errors import WorkflowError
from voform.core.terms import (
    EMPTY,
    InstantiationLevel,
    ServiceTerm,
    Substitution,
    instantiation_level,
    unify,
    variable_names,
)


@dataclass(frozen=True)
class Workflow:
    """
    A set of web services plus an annotation constraining their variables.

    Services keep the order they were given in; duplicates are removed.
    """

    services: Tuple[ServiceTerm, ...]
    annotation: ConstraintAnnotation = field(default_factory=ConstraintAnnotation)

    def __post_init__(self):
        unique = []
        for service in self.services:
            if not isinstance(service, ServiceTerm):
                raise WorkflowError(f"Not a service term: {service}")
            if service not in unique:
                unique.append(service)
        object.__setattr__(self, 'services', tuple(unique))

        if not self.services:
            raise WorkflowError("A workflow needs at least one service")

        mentioned = variable_names(*self.services)
        stray = self.annotation.variable_names() - mentioned
        if stray:
            raise WorkflowError(
                f"Annotation mentions variables absent from the services: {', '.join(sorted(stray))}"
            )
        if not self.annotation.satisfiable():
            raise WorkflowError(f"Annotation is unsatisfiable: {self.annotation}")
        if self.is_concrete and not self.annotation.is_empty:
            raise WorkflowError("A concrete workflow cannot carry constraints")

    @property
    def is_concrete(self) -> bool:
        return all(
            instantiation_level(s) is InstantiationLevel.CONCRETE for s in self.services
        )

    def service_names(self) -> Tuple[str, ...]:
        return tuple(s.name for s in self.services)

    def instantiate(self, subst: Substitution) -> 'Workflow':
        """Apply ``subst`` to every service and restrict the annotation."""
        return Workflow(
            tuple(subst.resolve(s) for s in self.services),
            self.annotation.restrict(subst),
        )

    def extended(self, services: Iterable[ServiceTerm]) -> 'Workflow':
        return Workflow(self.services + tuple(services), self.annotation)

    def __str__(self) -> str:
        text = '{' + ', '.join(str(s) for s in self.services) + '}'
        if self.annotation:
            text += ' | ' + str(self.annotation)
        return text


def workflow_is_concrete(workflow: Workflow) -> bool:
    return workflow.is_concrete


def instance_substitution(general: Workflow, specific: Workflow):
    """
    Substitution that maps ``general`` onto ``specific`` service by service.

    Returns None when the workflows differ in size or some pair of
    services does not unify.
    """
    if len(general.services) != len(specific.services):
        return None
    subst = EMPTY
    for abstract, concrete in zip(general.services, specific.services):
        subst = unify(abstract, concrete, subst)
        if subst is None:
            return None
    return subst
