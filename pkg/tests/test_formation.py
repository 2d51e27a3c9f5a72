"""Tests for the formation transitions and the runner."""

import json
from dataclasses import replace

import pytest

from voform.config.manager import FormationDefaults
from voform.core.syntax import parse_atom, parse_formula, parse_service
from voform.core.terms import FreshVariables
from voform.engines.protocol import PROVIDER, REQUESTER
from voform.formation.errors import NegotiationFailed, StageError
from voform.formation.partial_vo import PartialVO, Stage
from voform.formation.runner import run_formation
from voform.formation.strategies import (
    AllowListTrustFilter,
    FirstProtocolRoleAssigner,
    FormationStrategy,
    SeededProviderChooser,
    UnfulfilledGoalSelector,
    WorkflowPlan,
)
from voform.formation.transitions import (
    TRANSITIONS,
    agree_contracts,
    agree_workflow,
    derive_abstract_workflow,
    discover_partners,
    establish_roles,
    identify_goals,
    select_partners,
)
from voform.scenario.loader import bundled_scenario_path, scenario_from_dict

IMAGE = "satImage([38.0,-9.4,1000,500,5,radar,3],ers1.data)"
DETECTION = "oilSpillDetect([ers1.data,sar,5],spill.map)"


def earthobs_document():
    return json.loads(bundled_scenario_path("earthobs").read_text(encoding="utf-8"))


def agent_entry(document, agent_id):
    return next(a for a in document["society"]["agents"] if a["id"] == agent_id)


def form(scenario, **overrides):
    settings = replace(scenario.settings, **overrides).resolved(FormationDefaults())
    return run_formation(scenario.society, scenario.registry, settings.initiator, settings=settings)


@pytest.fixture
def earthobs_trace(earthobs):
    return form(earthobs)


class TestEarthObservation:
    """The oil-spill detection organisation forms end to end."""

    def test_succeeds(self, earthobs_trace):
        assert earthobs_trace.succeeded
        assert earthobs_trace.failure is None
        assert [s.name for s in earthobs_trace.steps] == list(TRANSITIONS)

    def test_stages_advance(self, earthobs_trace):
        stages = [s.after.stage for s in earthobs_trace.steps]
        assert stages == list(Stage)[1:]
        assert all(s.report.passed for s in earthobs_trace.steps)

    def test_goals_from_request(self, earthobs_trace):
        goals = earthobs_trace.steps[0].after.initial_goals
        assert [str(g) for g in goals] == [
            "toBuy(satImage([38.0,-9.4,_,500,_,radar,_],_))",
            "toBuy(oilSpillDetect([_,_,5],_))",
        ]

    def test_partner_discovery_and_trust(self, earthobs_trace):
        discovered, selected = earthobs_trace.steps[1].after, earthobs_trace.steps[2].after
        assert discovered.ids == ("clientAg", "procOSAg", "radSatAg", "satERS1ag")
        assert selected.ids == ("clientAg", "procOSAg", "satERS1ag")

    def test_roles_established(self, earthobs_trace):
        vo = earthobs_trace.steps[3].after
        names = sorted((r.label.name, r.label.service_name) for r in vo.roles)
        assert names == [
            (PROVIDER, "oilSpillDetect"), (PROVIDER, "satImage"),
            (REQUESTER, "oilSpillDetect"), (REQUESTER, "satImage"),
        ]
        assert [r.label.name for r in vo.member("clientAg").roles] == [REQUESTER, REQUESTER]

    def test_workflow_agreed(self, earthobs_trace):
        vo = earthobs_trace.steps[4].after
        assert [str(s) for s in vo.workflow.services] == [IMAGE, DETECTION]
        assert vo.workflow.is_concrete
        assert str(vo.abstract_workflow.annotation) == "Res in [900,1100]"

        provider_goals = vo.member("procOSAg").goals
        assert parse_atom("toSell(oilSpillDetect([Data,sar,5],spill.map))") in provider_goals

    def test_dialogues_held(self, earthobs_trace):
        transcripts = earthobs_trace.transcripts()
        assert [(t.initiator, t.responder) for t in transcripts] == [
            ("clientAg", "satERS1ag"), ("clientAg", "procOSAg"),
        ]
        assert all(t.succeeded for t in transcripts)

    def test_contracts(self, earthobs_trace):
        final = earthobs_trace.final
        assert final.stage is Stage.CONTRACTS_AGREED
        assert [c.cid for c in final.contracts] == ["clientAg.satImage.0", "clientAg.oilSpillDetect.0"]
        assert final.contracts[0].gt == (parse_formula("dueBy(ers1.data,1400hrs,12.4.09)"),)
        assert final.contracts[1].parties == ("clientAg", "procOSAg")

    def test_seed_names_contracts(self, earthobs):
        trace = form(earthobs, seed=7)
        assert [c.cid for c in trace.final.contracts] == ["clientAg.satImage.7", "clientAg.oilSpillDetect.7"]

    def test_deterministic(self, earthobs):
        first, second = form(earthobs), form(earthobs)
        assert [s.after.to_dict() for s in first.steps] == [s.after.to_dict() for s in second.steps]

    def test_without_request_every_goal_is_pursued(self, earthobs):
        trace = form(earthobs, request=None)
        assert trace.succeeded
        assert len(trace.steps[0].after.initial_goals) == 2


class TestFailures:
    """Each failure stops the run at its transition with its own code."""

    def test_unknown_initiator(self, earthobs):
        trace = run_formation(earthobs.society, earthobs.registry, "ghostAg")
        assert not trace.succeeded
        assert (trace.failure.transition, trace.failure.code) == ("identify_goals", "UnknownInitiator")
        assert trace.steps == []

    def test_request_that_does_not_decompose(self, earthobs):
        trace = form(earthobs, request=parse_atom("monitorCoast(north)"))
        assert trace.failure.code == "NoUnfulfillableGoals"

    def test_goals_already_fulfilled(self):
        document = earthobs_document()
        client = agent_entry(document, "clientAg")
        client["knowledge"] = [
            "bought(satImage([38.0,-9.4,1000,500,5,radar,3],ers1.data))",
            "bought(oilSpillDetect([ers1.data,sar,5],spill.map))",
        ]
        trace = form(scenario_from_dict(document))
        assert trace.failure.code == "NoUnfulfillableGoals"

    def test_pruning_every_provider(self, earthobs):
        trace = form(earthobs, allow=None, deny=("satERS1ag", "radSatAg"))
        assert (trace.failure.transition, trace.failure.code) == ("select_partners", "PruningBrokeCoverage")
        assert len(trace.steps) == 2

    def test_provider_refuses(self):
        document = earthobs_document()
        agent_entry(document, "satERS1ag")["goals"] = [
            "toSell(satImage([40.0,-9.4,1000,500,5,radar,3],ers1.data))"
        ]
        trace = form(scenario_from_dict(document))
        assert (trace.failure.transition, trace.failure.code) == ("agree_workflow", "NegotiationFailed")
        assert trace.final.stage is Stage.ROLES_ESTABLISHED

    def test_agreement_outside_annotation(self):
        document = earthobs_document()
        agent_entry(document, "satERS1ag")["goals"] = [
            "toSell(satImage([38.0,-9.4,2000,500,5,radar,3],ers1.data))"
        ]
        trace = form(scenario_from_dict(document))
        assert trace.failure.code == "ConstraintViolated"

    def test_ambiguous_protocol(self):
        document = earthobs_document()
        document["protocols"]["pc-provider-alt"] = dict(document["protocols"]["pc-provider"])
        agent_entry(document, "radSatAg")["roles"][0]["protocol"] = "pc-provider-alt"
        document["formation"]["trust"] = {"allow": ["satERS1ag", "radSatAg", "procOSAg"]}
        scenario = scenario_from_dict(document)

        strict = form(scenario, role_choice="strict")
        assert (strict.failure.transition, strict.failure.code) == ("establish_roles", "AmbiguousProtocol")

        chosen = form(scenario, role_choice="strict", clause_choices=(("provider(satImage)", "pc-provider"),))
        assert chosen.succeeded
        assert "satERS1ag" in chosen.final.ids

        first = form(scenario, role_choice="first")
        assert first.succeeded
        assert "radSatAg" in first.final.ids

    def test_unavailable_clause_choice(self, earthobs):
        trace = form(earthobs, clause_choices=(("provider(satImage)", "pc-missing"),))
        assert trace.failure.code == "NoProtocolForRole"


class TestNegotiationStrategies:
    """Exhaustive negotiation and provider choice."""

    @pytest.fixture
    def both_sellers(self):
        document = earthobs_document()
        document["formation"]["trust"] = {"allow": ["satERS1ag", "radSatAg", "procOSAg"]}
        return scenario_from_dict(document)

    def test_first_success_wins(self, both_sellers):
        trace = form(both_sellers)
        assert trace.succeeded
        assert "radSatAg" in trace.final.ids
        assert "satERS1ag" not in trace.final.ids

    def test_exhaustive_talks_to_everyone(self, both_sellers):
        trace = form(both_sellers, exhaustive_negotiation=True)
        assert trace.succeeded
        responders = [t.responder for t in trace.transcripts()]
        assert responders[:2] == ["radSatAg", "satERS1ag"]

    def test_seeded_choice_is_reproducible(self, both_sellers):
        picks = {
            tuple(form(both_sellers, exhaustive_negotiation=True, provider_choice="seeded", seed=seed).final.ids)
            for seed in (3, 3)
        }
        assert len(picks) == 1

    def test_seeded_chooser(self):
        chooser = SeededProviderChooser(seed=5)
        again = SeededProviderChooser(seed=5)
        options = ["a", "b", "c"]
        assert [chooser.choose(None, options) for _ in range(5)] == [again.choose(None, options) for _ in range(5)]


class TestTransitions:
    """Transitions called directly."""

    def test_stage_is_enforced(self, earthobs):
        with pytest.raises(StageError) as exc_info:
            discover_partners(PartialVO(), earthobs.registry)
        assert exc_info.value.code == "StageError"

    def test_identify_goals_starts_with_initiator(self, earthobs):
        vo = identify_goals(earthobs.society, "clientAg", FormationStrategy())
        assert vo.stage is Stage.GOALS_IDENTIFIED
        assert vo.ids == ("clientAg",)
        assert vo.goals == vo.initial_goals

    def test_transitions_chain_by_hand(self, earthobs):
        settings = earthobs.settings.resolved(FormationDefaults())
        strategy = FormationStrategy.from_settings(settings)
        society = earthobs.society

        vo = identify_goals(society, "clientAg", strategy)
        vo = discover_partners(vo, earthobs.registry)
        vo = select_partners(vo, society, strategy)
        vo = establish_roles(vo, society, strategy)
        vo = agree_workflow(vo, society, strategy, settings.max_dialogue_steps, earthobs.registry)
        assert [str(s) for s in vo.workflow.services] == [IMAGE, DETECTION]

        vo = agree_contracts(vo, society, settings.guarantees_by_service(), 3)
        assert vo.stage is Stage.CONTRACTS_AGREED
        assert [c.cid for c in vo.contracts] == ["clientAg.satImage.3", "clientAg.oilSpillDetect.3"]

    def test_abstract_workflow_from_templates(self, earthobs):
        plan = WorkflowPlan(earthobs.settings.templates, earthobs.settings.annotation)
        goals = identify_goals(earthobs.society, "clientAg", FormationStrategy()).initial_goals
        workflow, pairs = derive_abstract_workflow(goals, plan)

        assert [str(s) for s in workflow.services] == [
            "satImage([38.0,-9.4,Res,500,Freq,radar,Wave],Image)",
            "oilSpillDetect([Image,Model,5],Map)",
        ]
        assert str(workflow.annotation) == "Res in [900,1100]"
        assert [goal.name for goal, _ in pairs] == ["satImage", "oilSpillDetect"]

    def test_abstract_workflow_without_templates(self, earthobs):
        goals = identify_goals(earthobs.society, "clientAg", FormationStrategy()).initial_goals
        workflow, _ = derive_abstract_workflow(goals, WorkflowPlan(), FreshVariables())
        assert all("_" not in str(s).replace("_G", "") for s in workflow.services)
        assert workflow.annotation.is_empty

    def test_template_mismatch(self, earthobs):
        plan = WorkflowPlan((parse_service("satImage([Lat,Long],Image)"),))
        goals = identify_goals(earthobs.society, "clientAg", FormationStrategy()).initial_goals
        with pytest.raises(NegotiationFailed):
            derive_abstract_workflow(goals, plan)


class TestStrategies:
    """Default strategy objects."""

    def test_trust_filter(self):
        keep = AllowListTrustFilter(allow=["a", "b"], deny=["b"])
        assert keep.prune(["a", "b", "c", "init"], "init") == ["a"]
        assert AllowListTrustFilter().prune(["a", "init"], "init") == ["a"]

    def test_goal_selector_without_request(self, earthobs):
        agent = earthobs.society.agent("clientAg")
        assert UnfulfilledGoalSelector().select(agent, agent.goals) == list(agent.goals)

    def test_unknown_role_choice(self):
        with pytest.raises(ValueError):
            FirstProtocolRoleAssigner(choice="random")

    def test_unknown_provider_choice(self, earthobs):
        with pytest.raises(ValueError):
            FormationStrategy.from_settings(replace(earthobs.settings, provider_choice="cheapest"))
