"""Exceptions raised by formation transitions and strategies."""

from typing import Optional

from voform.core.report import CheckReport


class FormationError(Exception):
    """Base exception for formation errors. ``code`` names the failure kind."""

    def __init__(self, message: str, transition: Optional[str] = None):
        self.transition = transition
        super().__init__(message)

    @property
    def code(self) -> str:
        return type(self).__name__


class UnknownInitiator(FormationError):
    def __init__(self, agent_id: str):
        self.agent_id = agent_id
        super().__init__(f"Initiator {agent_id} is not a member of the society", 'identify_goals')


class NoUnfulfillableGoals(FormationError):
    def __init__(self, agent_id: str):
        self.agent_id = agent_id
        super().__init__(f"{agent_id} has no goal it cannot fulfil alone", 'identify_goals')


class PruningBrokeCoverage(FormationError):
    def __init__(self, service):
        self.service = service
        super().__init__(f"No trusted provider left for {service}", 'select_partners')


class NoProtocolForRole(FormationError):
    def __init__(self, label, detail: str = ""):
        self.label = label
        message = f"No protocol clause for role {label}"
        if detail:
            message += f": {detail}"
        super().__init__(message, 'establish_roles')


class AmbiguousProtocol(FormationError):
    def __init__(self, label, clauses):
        self.label = label
        self.clauses = list(clauses)
        super().__init__(
            f"Role {label} has several protocol clauses ({', '.join(self.clauses)}) and no choice was made",
            'establish_roles',
        )


class NegotiationFailed(FormationError):
    def __init__(self, service, reason: str = ""):
        self.service = service
        self.reason = reason
        message = f"No provider agreed to {service}"
        if reason:
            message += f" ({reason})"
        super().__init__(message, 'agree_workflow')


class ConstraintViolated(FormationError):
    def __init__(self, service, annotation):
        self.service = service
        self.annotation = annotation
        super().__init__(
            f"Every agreed instantiation of {service} violates {annotation}", 'agree_workflow'
        )


class ContractInvalid(FormationError):
    def __init__(self, report: CheckReport):
        self.report = report
        super().__init__(
            f"Drafted {report.subject} is invalid: {', '.join(report.failed_names())}",
            'agree_contracts',
        )


class StageError(FormationError):
    """A transition was applied to a state at the wrong stage."""

    def __init__(self, transition: str, expected, actual):
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"{transition} needs stage {expected.value}, got {actual.value}", transition
        )


class TransitionCheckFailed(FormationError):
    """An after-state failed the independent transition checks."""

    def __init__(self, transition: str, report: CheckReport):
        self.report = report
        super().__init__(
            f"{transition} produced a state failing: {', '.join(report.failed_names())}", transition
        )
