"""
Scenario files and formation traces.
"""

from voform.scenario.loader import (
    ScenarioError,
    ScenarioSemanticError,
    ScenarioSyntaxError,
    Violation,
    bundled_scenario_path,
    emit_scenario,
    load_scenario_text,
    parse_scenario,
    scenario_from_dict,
)
from voform.scenario.schema import SCENARIO_KEYS, ScenarioFile
from voform.scenario.trace import (
    TRACE_FORMAT,
    TraceError,
    TraceVerdict,
    check_trace,
    check_trace_file,
    emit_trace,
    load_trace,
    trace_to_dict,
)

__all__ = [
    'ScenarioError', 'ScenarioSemanticError', 'ScenarioSyntaxError', 'Violation',
    'bundled_scenario_path', 'emit_scenario', 'load_scenario_text', 'parse_scenario',
    'scenario_from_dict', 'SCENARIO_KEYS', 'ScenarioFile',
    'TRACE_FORMAT', 'TraceError', 'TraceVerdict', 'check_trace', 'check_trace_file',
    'emit_trace', 'load_trace', 'trace_to_dict',
]
