"""Protocol engine: knowledge bases, protocol clauses, dialogues and coherence."""

from voform.engines.coherence import check_role_goal_coherence
from voform.engines.dialogue import (
    DialogueOutcome,
    DialogueStep,
    DialogueTranscript,
    enabled_operations,
    run_dialogue,
)
from voform.engines.knowledge import KnowledgeBase, apply_postcondition, evaluate, solutions
from voform.engines.protocol import (
    Direction,
    Locution,
    ProtocolClause,
    ProtocolOperation,
    Role,
    RoleLabel,
)

__all__ = [
    'DialogueOutcome', 'DialogueStep', 'DialogueTranscript', 'Direction',
    'KnowledgeBase', 'Locution', 'ProtocolClause', 'ProtocolOperation', 'Role',
    'RoleLabel', 'apply_postcondition', 'check_role_goal_coherence',
    'enabled_operations', 'evaluate', 'run_dialogue', 'solutions',
]
