"""Tests for contract drafting and validation."""

from dataclasses import replace

import pytest
from hypothesis import given, settings

from voform.contracts.contract import (
    Contract,
    ContextEntry,
    SameParty,
    draft_contract,
    make_contract_id,
    validate_contract,
)
from voform.core.syntax import parse_formula, parse_role_label, parse_service
from voform.core.workflow import Workflow
from tests.generators import INITIATOR, contract_cases, draft_cases
from tests.oracles import contract_rules

CONVERSION = "formatConversion([image.jpeg,jpegTOgif],imageGIF.gif)"
REPROJECTION = "reprojection([imageGIF.gif,utm29],image.utm.gif)"
GUARANTEES = (
    "dueBy(imageGIF.gif,1400hrs,12.4.09)",
    "priceReduced(imageGIF.gif,1400hrs,12.4.09,reduction(0.5))",
)


def entry(agent_id, *labels):
    return ContextEntry(agent_id, tuple(parse_role_label(label) for label in labels))


def contract(*context, services=(CONVERSION,), cid="clientAg.formatConversion.0"):
    return Contract(
        cid=cid,
        context=tuple(context),
        sdt=Workflow(tuple(parse_service(s) for s in services)),
        gt=tuple(parse_formula(g) for g in GUARANTEES),
    )


@pytest.fixture
def contract_x():
    return contract(
        entry("clientAg", f"requester({CONVERSION})"),
        entry("procF", f"provider({CONVERSION})"),
    )


class TestValidateContract:
    """Each well-formedness rule, violated on its own."""

    def test_valid(self, contract_x, contractx):
        report = validate_contract(contract_x, contractx.society)
        assert report.passed
        assert [c.name for c in report.checks] == [
            "cid-format", "requester-provider-pair", "no-self-dealing", "sdt-coverage", "roles-held",
        ]

    def test_no_requester_provider_pair(self, contractx):
        providers_only = contract(
            entry("procF", f"provider({CONVERSION})"),
            entry("projAg", f"provider({REPROJECTION})"),
        )
        assert validate_contract(providers_only, contractx.society).failed_names() == ["requester-provider-pair"]

    def test_self_dealing(self, contractx):
        requester = contractx.protocol("pc-requester").bind(parse_service("formatConversion(In,Out)"))
        agents = tuple(
            replace(a, roles=a.roles + (requester,)) if a.agent_id == "procF" else a
            for a in contractx.society.agents
        )
        society = replace(contractx.society, agents=agents)
        dealing = contract(
            entry("clientAg", f"requester({CONVERSION})"),
            entry("procF", f"provider({CONVERSION})", f"requester({CONVERSION})"),
        )
        assert validate_contract(dealing, society).failed_names() == ["no-self-dealing"]

    def test_uncovered_service(self, contractx):
        uncovered = contract(
            entry("clientAg", f"requester({CONVERSION})"),
            entry("procF", f"provider({CONVERSION})"),
            services=(CONVERSION, REPROJECTION),
        )
        assert validate_contract(uncovered, contractx.society).failed_names() == ["sdt-coverage"]

    def test_role_not_held(self, contractx):
        unheld = contract(
            entry("clientAg", f"requester({CONVERSION})"),
            entry("procF", f"provider({CONVERSION})"),
            entry("projAg", f"provider({CONVERSION})"),
        )
        report = validate_contract(unheld, contractx.society)
        assert report.failed_names() == ["roles-held"]
        assert "projAg" in report.failures[0].detail

    def test_bad_identifier(self, contractx):
        bad = contract(
            entry("clientAg", f"requester({CONVERSION})"),
            entry("procF", f"provider({CONVERSION})"),
            cid="Not An Id",
        )
        assert validate_contract(bad, contractx.society).failed_names() == ["cid-format"]


class TestDraftContract:
    """Two-party contracts for one service."""

    def test_draft_is_valid(self, contractx, contract_x):
        drafted = draft_contract(
            "clientAg", "procF", parse_service(CONVERSION),
            tuple(parse_formula(g) for g in GUARANTEES),
        )
        assert drafted == contract_x
        assert validate_contract(drafted, contractx.society).passed
        assert drafted.parties == ("clientAg", "procF")

    def test_same_party_rejected(self):
        with pytest.raises(SameParty):
            draft_contract("procF", "procF", parse_service(CONVERSION))

    def test_initiator_names_the_contract(self):
        drafted = draft_contract("procF", "projAg", parse_service(REPROJECTION), id_seed=3, initiator="clientAg")
        assert drafted.cid == "clientAg.reprojection.3"
        assert drafted.roles_of("projAg") == [parse_role_label(f"provider({REPROJECTION})")]


def test_contract_ids_never_repeat():
    taken = {"clientAg.satImage.0"}
    assert make_contract_id("clientAg", "satImage", 0) == "clientAg.satImage.0"
    assert make_contract_id("clientAg", "satImage", 0, taken) == "clientAg.satImage.0.2"
    assert make_contract_id("clientAg", "satImage", 0, taken | {"clientAg.satImage.0.2"}) == "clientAg.satImage.0.3"


def test_contract_text(contract_x):
    text = str(contract_x)
    assert text.startswith("<clientAg.formatConversion.0, {<clientAg, {requester(")
    assert "reduction(0.5)" in text


def test_contract_dict_round_trip(contract_x):
    assert Contract.from_dict(contract_x.to_dict()) == contract_x


@pytest.mark.slow
class TestContractRulesAgainstEnumeration:
    """Random contracts over generated societies."""

    @given(contract_cases())
    @settings(max_examples=200, deadline=None)
    def test_rules_match_literal_check(self, case):
        society, generated = case
        verdicts = {check.name: check.passed for check in validate_contract(generated, society).checks}
        expected = contract_rules(generated, society)
        assert verdicts["cid-format"]
        assert {name: verdicts[name] for name in expected} == expected

    @given(draft_cases())
    @settings(max_examples=150, deadline=None)
    def test_drafts_are_well_formed(self, case):
        society, requester, provider, service, seed = case
        drafted = draft_contract(requester, provider, service, id_seed=seed)
        verdicts = {check.name: check.passed for check in validate_contract(drafted, society).checks}

        assert drafted.parties == (requester, provider)
        assert verdicts["cid-format"]
        assert verdicts["requester-provider-pair"]
        assert verdicts["no-self-dealing"]
        assert verdicts["sdt-coverage"]
        assert verdicts["roles-held"] == contract_rules(drafted, society)["roles-held"]

    @given(draft_cases())
    @settings(max_examples=100, deadline=None)
    def test_initiator_drafts_with_a_real_provider_pass(self, case):
        society, _, provider, service, seed = case
        if provider == INITIATOR:
            return
        offered = {role.label.parameter.name for role in society.agent(provider).roles}
        drafted = draft_contract(INITIATOR, provider, service, id_seed=seed)
        assert validate_contract(drafted, society).passed == (service.name in offered)
