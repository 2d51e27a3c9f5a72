"""Run the six formation transitions in order and record the trace."""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from voform.core.report import CheckReport
from voform.engines.dialogue import DialogueTranscript
from voform.formation.checks import validate_transition
from voform.formation.errors import FormationError, TransitionCheckFailed
from voform.formation.partial_vo import PartialVO, Stage
from voform.formation.settings import FormationSettings
from voform.formation.strategies import FormationStrategy
from voform.formation.transitions import (
    agree_contracts,
    discover_partners,
    establish_roles,
    identify_goals,
    negotiate_workflow,
    select_partners,
)
from voform.society.registry import Registry
from voform.society.society import AgentSociety
from voform.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass
class TraceStep:
    """One completed transition."""
    name: str
    before: PartialVO
    after: PartialVO
    report: CheckReport
    transcripts: Tuple[DialogueTranscript, ...] = ()


@dataclass
class FormationFailure:
    transition: str
    code: str
    message: str


@dataclass
class FormationTrace:
    steps: List[TraceStep] = field(default_factory=list)
    failure: Optional[FormationFailure] = None

    @property
    def final(self) -> PartialVO:
        return self.steps[-1].after if self.steps else PartialVO()

    @property
    def succeeded(self) -> bool:
        return self.failure is None and self.final.stage is Stage.CONTRACTS_AGREED

    def transcripts(self) -> List[DialogueTranscript]:
        return [t for step in self.steps for t in step.transcripts]


def run_formation(
    society: AgentSociety,
    registry: Registry,
    ag0: str,
    strategy: Optional[FormationStrategy] = None,
    settings: Optional[FormationSettings] = None,
) -> FormationTrace:
    """
    Form an organisation around ``ag0``.

    Every transition's result is re-checked with ``validate_transition``
    before the next one runs. The run stops at the first formation error,
    returning the trace so far with the failure recorded.

    Args:
        society: The agent society
        registry: Discovery registry
        ag0: Initiating agent
        strategy: Strategies (defaults built from ``settings``)
        settings: Resolved formation settings

    Returns:
        The formation trace
    """
    settings = settings or FormationSettings(initiator=ag0)
    strategy = strategy or FormationStrategy.from_settings(settings)
    max_steps = settings.max_dialogue_steps or 16
    seed = settings.seed or 0
    guarantees = settings.guarantees_by_service()

    trace = FormationTrace()
    state = PartialVO()

    def workflow(vo: PartialVO):
        agreement = negotiate_workflow(vo, society, strategy, max_steps, registry)
        return agreement.state, agreement.transcripts

    steps = (
        ('identify_goals', lambda vo: (identify_goals(society, ag0, strategy), ())),
        ('discover_partners', lambda vo: (discover_partners(vo, registry), ())),
        ('select_partners', lambda vo: (select_partners(vo, society, strategy), ())),
        ('establish_roles', lambda vo: (establish_roles(vo, society, strategy), ())),
        ('agree_workflow', workflow),
        ('agree_contracts', lambda vo: (agree_contracts(vo, society, guarantees, seed), ())),
    )

    for name, transition in steps:
        try:
            after, transcripts = transition(state)
            report = validate_transition(state, after, name, society, transcripts)
            if not report.passed:
                raise TransitionCheckFailed(name, report)
        except FormationError as exc:
            transition_name = exc.transition or name
            logger.error("Formation stopped at %s: %s", transition_name, exc)
            trace.failure = FormationFailure(transition_name, exc.code, str(exc))
            return trace

        trace.steps.append(TraceStep(name, state, after, report, tuple(transcripts)))
        state = after

    logger.info("Formed organisation of %s", ', '.join(state.ids))
    return trace
