"""Property tests: formation over generated scenarios."""

import copy
import json

import pytest
from hypothesis import given, settings, strategies as st

from voform.config.manager import FormationDefaults
from voform.contracts.contract import validate_contract
from voform.formation.runner import run_formation
from voform.scenario.loader import scenario_from_dict
from voform.scenario.trace import check_trace, emit_trace, trace_from_dict
from tests.generators import INITIATOR, scenario_documents

INTERNAL_CODES = {"TransitionCheckFailed", "StageError"}


def form(document):
    scenario = scenario_from_dict(document)
    resolved = scenario.settings.resolved(FormationDefaults())
    trace = run_formation(scenario.society, scenario.registry, resolved.initiator, settings=resolved)
    return scenario, resolved, trace


def trace_data(document):
    scenario, resolved, trace = form(document)
    return json.loads(emit_trace(scenario, trace, resolved.seed))


@pytest.mark.slow
@given(scenario_documents())
@settings(max_examples=200, deadline=None)
def test_every_recorded_transition_passes_its_checks(document):
    _, _, trace = form(document)
    for step in trace.steps:
        assert step.report.passed, step.report.format_report()
    if trace.failure is not None:
        assert trace.failure.code not in INTERNAL_CODES


@pytest.mark.slow
@given(scenario_documents())
@settings(max_examples=200, deadline=None)
def test_saved_trace_rechecks(document):
    report = check_trace(trace_data(document))
    assert report.passed, report.format_report()


@pytest.mark.slow
@given(scenario_documents())
@settings(max_examples=100, deadline=None)
def test_reloaded_trace_re_emits_identically(document):
    scenario, resolved, trace = form(document)
    text = emit_trace(scenario, trace, resolved.seed)
    assert emit_trace(*trace_from_dict(json.loads(text))) == text


@pytest.mark.slow
@given(scenario_documents())
@settings(max_examples=200, deadline=None)
def test_formed_organisation_invariants(document):
    scenario, _, trace = form(document)
    if not trace.succeeded:
        return
    final = trace.final
    assert INITIATOR in final.ids
    assert len(final.agents) >= 2
    assert len(final.contracts) == len(final.workflow.services)
    sellers = {agent["id"]: agent["goals"] for agent in document["society"]["agents"]}
    for contract in final.contracts:
        assert validate_contract(contract, scenario.society).passed
        requester, provider = contract.parties
        assert requester == INITIATOR
        assert f"toSell({contract.sdt.services[0]})" in sellers[provider]


@pytest.mark.slow
@given(scenario_documents())
@settings(max_examples=200, deadline=None)
def test_no_formation_without_trusted_registered_provider(document):
    denied = set(document["formation"].get("trust", {}).get("deny", []))
    registered = {(entry["agent"], entry["service"].split("(")[0]) for entry in document["registry"]}
    names = [s.split("(")[0] for s in document["society"]["services"]]
    covered = all(
        any(service == name and provider not in denied for provider, service in registered)
        for name in names
    )
    _, _, trace = form(document)
    if not covered:
        assert not trace.succeeded


def _members(state):
    initiator = next(a for a in state["agents"] if a["id"] == state["initiator"])
    other = next(a for a in state["agents"] if a["id"] != state["initiator"] and a["roles"])
    return initiator, other


def drop_contract(state):
    state["contracts"].pop()


def drop_initiator_goals(state):
    initiator, _ = _members(state)
    initiator["goals"] = []
    state["goals"] = [g for a in state["agents"] for g in a["goals"]]


def swap_roles(state):
    initiator, other = _members(state)
    initiator["roles"], other["roles"] = other["roles"], initiator["roles"]


def second_clause_for_a_label(state):
    _, other = _members(state)
    duplicate = dict(other["roles"][0], protocol="pc-other")
    other["roles"].append(duplicate)
    state["roles"].append(duplicate)


TAMPERINGS = {
    drop_contract: "contract-count",
    drop_initiator_goals: "goals-unchanged",
    swap_roles: "members-are-partial-agents",
    second_clause_for_a_label: "members-are-partial-agents",
}


@pytest.mark.slow
@given(scenario_documents(), st.sampled_from(sorted(TAMPERINGS, key=lambda f: f.__name__)))
@settings(max_examples=200, deadline=None)
def test_tampering_with_formed_trace_is_detected(document, tamper):
    data = trace_data(document)
    if data["outcome"]["status"] != "formed":
        return
    tamper(data["transitions"][-1]["after"])
    data["final"] = copy.deepcopy(data["transitions"][-1]["after"])
    report = check_trace(data)
    assert not report.passed
    assert TAMPERINGS[tamper] in report.failed_names()


@given(scenario_documents())
@settings(max_examples=50, deadline=None)
def test_formation_is_deterministic(document):
    assert trace_data(document) == trace_data(document)
