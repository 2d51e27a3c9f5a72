"""
Formation process: partial VOs, strategies, transitions, checks and the runner.
"""

from voform.formation.checks import STAGES, validate_state, validate_transition
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
from voform.formation.runner import FormationFailure, FormationTrace, TraceStep, run_formation
from voform.formation.settings import BUY, FormationSettings, requested_service
from voform.formation.strategies import (
    AllowListTrustFilter,
    FirstProtocolRoleAssigner,
    FirstSuccessProviderChooser,
    FormationStrategy,
    GoalSelector,
    NoWorkflowExtension,
    ProviderChooser,
    RoleAssigner,
    SeededProviderChooser,
    TrustFilter,
    UnfulfilledGoalSelector,
    WorkflowExtender,
    WorkflowPlan,
)
from voform.formation.transitions import (
    TRANSITIONS,
    WorkflowAgreement,
    agree_contracts,
    agree_workflow,
    derive_abstract_workflow,
    discover_partners,
    establish_roles,
    identify_goals,
    negotiate_workflow,
    select_partners,
)

__all__ = [
    'STAGES', 'validate_state', 'validate_transition',
    'AmbiguousProtocol', 'ConstraintViolated', 'ContractInvalid', 'FormationError',
    'NegotiationFailed', 'NoProtocolForRole', 'NoUnfulfillableGoals', 'PruningBrokeCoverage',
    'StageError', 'TransitionCheckFailed', 'UnknownInitiator',
    'PartialAgent', 'PartialVO', 'Stage',
    'FormationFailure', 'FormationTrace', 'TraceStep', 'run_formation',
    'BUY', 'FormationSettings', 'requested_service',
    'AllowListTrustFilter', 'FirstProtocolRoleAssigner', 'FirstSuccessProviderChooser',
    'FormationStrategy', 'GoalSelector', 'NoWorkflowExtension', 'ProviderChooser',
    'RoleAssigner', 'SeededProviderChooser', 'TrustFilter', 'UnfulfilledGoalSelector',
    'WorkflowExtender', 'WorkflowPlan',
    'TRANSITIONS', 'WorkflowAgreement', 'agree_contracts', 'agree_workflow',
    'derive_abstract_workflow', 'discover_partners', 'establish_roles', 'identify_goals',
    'negotiate_workflow', 'select_partners',
]
