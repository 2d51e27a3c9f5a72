"""
Formation trace files.

A trace records a whole formation run: the scenario it ran on, every
transition with the states before and after it and its check report, the
outcome and the final state. ``check_trace`` replays the transition checks
against a trace independently of the run that produced it.
"""

import json
from enum import IntEnum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from voform.core.errors import TermError, WorkflowError
from voform.core.report import CheckReport
from voform.engines.dialogue import DialogueTranscript
from voform.formation.checks import validate_state, validate_transition
from voform.formation.partial_vo import PartialVO
from voform.formation.runner import FormationFailure, FormationTrace, TraceStep
from voform.formation.transitions import TRANSITIONS
from voform.scenario.loader import ScenarioError, scenario_from_dict
from voform.scenario.schema import ScenarioFile
from voform.utils.logger import get_logger

logger = get_logger(__name__)

TRACE_FORMAT = "voform-trace/1"

_DECODE_ERRORS = (KeyError, TypeError, ValueError, TermError, WorkflowError)


class TraceError(Exception):
    """A trace file cannot be read or does not have the trace layout."""
    pass


class TraceVerdict(IntEnum):
    """Exit status of a trace check."""
    VALID = 0
    MALFORMED = 1
    INVALID = 2


def trace_to_dict(scenario: ScenarioFile, trace: FormationTrace, seed: int) -> Dict[str, Any]:
    outcome: Dict[str, Any] = {'status': 'formed' if trace.succeeded else 'failed', 'error': None}
    if trace.failure is not None:
        outcome['error'] = {
            'transition': trace.failure.transition,
            'code': trace.failure.code,
            'message': trace.failure.message,
        }
    return {
        'format': TRACE_FORMAT,
        'scenario': scenario.to_dict(),
        'seed': seed,
        'transitions': [
            {
                'name': step.name,
                'before': step.before.to_dict(),
                'after': step.after.to_dict(),
                'report': step.report.to_dict(),
                'transcripts': [t.to_dict() for t in step.transcripts],
            }
            for step in trace.steps
        ],
        'outcome': outcome,
        'final': trace.final.to_dict(),
    }


def emit_trace(scenario: ScenarioFile, trace: FormationTrace, seed: int, indent: int = 2) -> str:
    """Serialize a formation run as trace JSON."""
    return json.dumps(trace_to_dict(scenario, trace, seed), indent=indent, ensure_ascii=False) + "\n"


def load_trace(source: Union[str, Path]) -> Dict[str, Any]:
    """
    Read a trace file and check its layout.

    Raises:
        TraceError: If the file is unreadable, not JSON or missing trace keys
    """
    path = Path(source)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise TraceError(f"Cannot read trace {path}: {exc}") from exc

    if not isinstance(data, dict) or data.get('format') != TRACE_FORMAT:
        raise TraceError(f"{path} is not a {TRACE_FORMAT} trace")
    for key in ('scenario', 'transitions', 'outcome', 'final'):
        if key not in data:
            raise TraceError(f"{path}: missing '{key}'")
    if not isinstance(data['transitions'], list):
        raise TraceError(f"{path}: 'transitions' must be a list")
    return data


def _embedded_scenario(data: Dict[str, Any]) -> ScenarioFile:
    try:
        return scenario_from_dict(data['scenario'], "<trace scenario>")
    except ScenarioError as exc:
        raise TraceError(f"Embedded scenario is invalid: {exc}") from exc


def trace_from_dict(data: Dict[str, Any]) -> Tuple[ScenarioFile, FormationTrace, int]:
    """
    Rebuild the scenario, run and seed a trace was emitted from.

    ``emit_trace`` of the result reproduces the trace, except that the
    final state is always the last transition's after state.

    Raises:
        TraceError: If any part of the trace cannot be decoded
    """
    scenario = _embedded_scenario(data)

    trace = FormationTrace()
    for i, entry in enumerate(data['transitions']):
        try:
            trace.steps.append(TraceStep(
                name=entry['name'],
                before=PartialVO.from_dict(entry['before']),
                after=PartialVO.from_dict(entry['after']),
                report=CheckReport.from_dict(entry['report']),
                transcripts=tuple(DialogueTranscript.from_dict(t) for t in entry.get('transcripts', [])),
            ))
        except _DECODE_ERRORS as exc:
            raise TraceError(f"Transition {i} cannot be decoded: {exc}") from exc

    error = data['outcome'].get('error') if isinstance(data['outcome'], dict) else None
    if error is not None:
        try:
            trace.failure = FormationFailure(error['transition'], error['code'], error['message'])
        except (KeyError, TypeError) as exc:
            raise TraceError(f"Outcome error cannot be decoded: {exc}") from exc

    seed = data.get('seed')
    if not isinstance(seed, int):
        raise TraceError(f"Seed must be an integer, got {seed!r}")
    return scenario, trace, seed


def check_trace(data: Dict[str, Any]) -> CheckReport:
    """
    Re-validate every transition recorded in a trace.

    Checks that consecutive transitions join up, that each one passes
    ``validate_transition`` against the embedded scenario's society, and
    that the recorded final state is the last state reached.

    Raises:
        TraceError: If the embedded scenario or a recorded state cannot be decoded
    """
    scenario = _embedded_scenario(data)

    report = CheckReport(subject=f"trace of {scenario.name}")
    previous: Optional[PartialVO] = None
    names: List[str] = []

    for i, entry in enumerate(data['transitions']):
        try:
            name = entry['name']
            before = PartialVO.from_dict(entry['before'])
            after = PartialVO.from_dict(entry['after'])
            transcripts = [DialogueTranscript.from_dict(t) for t in entry.get('transcripts', [])]
        except _DECODE_ERRORS as exc:
            raise TraceError(f"Transition {i} cannot be decoded: {exc}") from exc

        names.append(name)
        if previous is not None:
            report.add('states-continuous', before == previous,
                       "before state differs from the previous after state", subject=name)
        step_report = validate_transition(before, after, name, scenario.society, transcripts or None)
        for check in step_report.checks:
            report.add(check.name, check.passed, check.detail, subject=check.subject or name)
        previous = after

    report.add('transition-order', names == list(TRANSITIONS[:len(names)]),
               f"recorded {', '.join(names) or 'nothing'}")

    try:
        final = PartialVO.from_dict(data['final'])
    except _DECODE_ERRORS as exc:
        raise TraceError(f"Final state cannot be decoded: {exc}") from exc
    report.add('final-is-last-state', final == (previous or PartialVO()))
    for check in validate_state(final, scenario.society).checks:
        report.add(check.name, check.passed, check.detail, subject=check.subject or 'final')

    status = data['outcome'].get('status') if isinstance(data['outcome'], dict) else None
    formed = len(names) == len(TRANSITIONS) and report.passed
    report.add('outcome-matches', (status == 'formed') == formed, f"recorded status {status!r}")

    logger.debug("Checked trace with %d transitions: %s", len(names),
                 "valid" if report.passed else ", ".join(report.failed_names()))
    return report


def check_trace_file(source: Union[str, Path]) -> TraceVerdict:
    """Check a trace file, mapping the result to an exit status."""
    try:
        report = check_trace(load_trace(source))
    except TraceError as exc:
        logger.error("%s", exc)
        return TraceVerdict.MALFORMED
    return TraceVerdict.VALID if report.passed else TraceVerdict.INVALID
