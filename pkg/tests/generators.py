"""
Builders and Hypothesis strategies for terms, protocols, annotations and
whole scenarios.

Scenario documents are plain dicts in the scenario file layout so they
exercise the loader as well as the formation engine.
"""

from decimal import Decimal
from typing import Any, Dict, List

from hypothesis import strategies as st

from voform.contracts.contract import Contract, ContextEntry
from voform.core.constraints import ConstraintAnnotation, IntervalMembership, SetMembership
from voform.core.syntax import parse_atom, parse_operation, parse_role_label, parse_service
from voform.core.terms import Compound, Constant, ListTerm, ServiceTerm, Variable
from voform.core.workflow import Workflow
from voform.engines.protocol import ProtocolClause, Role
from voform.scenario.loader import scenario_from_dict


REQUESTER_OPERATIONS = (
    "toBuy(S) & provides(Ag,S) [send(request(S),Ag,provider(S))] requested(S,Ag)",
    "requested(S,Ag) [receive(accept,Ag,provider(S))] bought(S)",
    "requested(S,Ag) [receive(refuse,Ag,provider(S))] true",
)

PROVIDER_OPERATIONS = (
    "true [receive(request(S),Ag,requester(S))] requestedBy(Ag,S)",
    "requestedBy(Ag,S) & toSell(S) [send(accept,Ag,requester(S))] sold(S)",
    "requestedBy(Ag,S) & ~toSell(S) [send(refuse,Ag,requester(S))] true",
)

PROTOCOLS = {
    "pc-requester": {"label": "requester(S)", "operations": list(REQUESTER_OPERATIONS)},
    "pc-provider": {"label": "provider(S)", "operations": list(PROVIDER_OPERATIONS)},
}

SERVICE_NAMES = ("svcA", "svcB", "svcC")
INPUTS = ("in1", "in2")
INITIATOR = "initAg"


def schema(name: str, label: str, operations) -> Role:
    """An unbound protocol role built from operation text."""
    return Role(
        parse_role_label(label),
        ProtocolClause(name, tuple(parse_operation(op) for op in operations)),
    )


def atoms(*texts):
    return tuple(parse_atom(t) for t in texts)


# Terms

SYMBOLS = st.sampled_from(["a", "b", "c", "radar", "ers1.data"])
NUMBERS = st.sampled_from(["0", "5", "38.0", "-9.4"])
NAMED_VARIABLES = st.sampled_from(["X", "Y", "Z", "Res"]).map(Variable)

constants = st.one_of(SYMBOLS, NUMBERS).map(Constant)


def terms(variables=NAMED_VARIABLES):
    """Finite terms over a small vocabulary, so unification often succeeds."""
    leaves = st.one_of(constants, variables)
    return st.recursive(
        leaves,
        lambda children: st.one_of(
            st.lists(children, max_size=3).map(lambda xs: ListTerm(tuple(xs))),
            st.lists(children, min_size=1, max_size=1).map(lambda xs: Compound("f", tuple(xs))),
            st.tuples(children, children).map(lambda p: ServiceTerm("g", p[0], p[1])),
        ),
        max_leaves=6,
    )


def services(variables=NAMED_VARIABLES):
    return st.tuples(st.sampled_from(["satImage", "oilSpillDetect"]), terms(variables), terms(variables)).map(
        lambda t: ServiceTerm(*t)
    )


# Constraint annotations

CONSTRAINT_VARIABLES = ("A", "B", "C", "D")
SET_VALUES = ("radar", "optical", "sar", "1", "2", "1000")
BOUNDS = st.sampled_from(["0", "1", "2", "900", "1000", "1100"]).map(Decimal)


@st.composite
def constraints(draw, variables=CONSTRAINT_VARIABLES):
    variable = Variable(draw(st.sampled_from(variables)))
    if draw(st.booleans()):
        lower, upper = sorted((draw(BOUNDS), draw(BOUNDS)))
        if draw(st.integers(min_value=0, max_value=4)) == 0:
            lower, upper = upper + 1, lower
        return IntervalMembership(variable, lower, upper)
    values = draw(st.lists(st.sampled_from(SET_VALUES), min_size=1, max_size=3, unique=True))
    return SetMembership(variable, frozenset(Constant(v) for v in values))


@st.composite
def annotations(draw):
    return ConstraintAnnotation(tuple(draw(st.lists(constraints(), max_size=5))))


@st.composite
def partial_bindings(draw):
    """Bindings of some constraint variables to constants or to other constraint variables."""
    bindings: Dict[str, Any] = {}
    for name in CONSTRAINT_VARIABLES:
        kind = draw(st.sampled_from(["free", "free", "constant", "alias"]))
        if kind == "constant":
            bindings[name] = Constant(draw(st.sampled_from(SET_VALUES + ("950", "5"))))
        elif kind == "alias":
            later = [v for v in CONSTRAINT_VARIABLES if v > name]
            if later:
                bindings[name] = Variable(draw(st.sampled_from(later)))
    return bindings


# Propositional protocols for dialogue oracles

DIALOGUE_FACTS = ("p", "q", "r", "s(a)", "s(b)", "t")
PERFORMATIVES = ("ask", "tell", "ok")


@st.composite
def literals(draw):
    fact = draw(st.sampled_from(DIALOGUE_FACTS))
    return f"~{fact}" if draw(st.integers(min_value=0, max_value=3)) == 0 else fact


@st.composite
def conditions(draw, allow_negation=True):
    parts = draw(st.lists(literals() if allow_negation else st.sampled_from(DIALOGUE_FACTS), max_size=2))
    return " & ".join(parts) if parts else "true"


@st.composite
def operation_texts(draw, partner_label: str):
    direction = draw(st.sampled_from(["send", "receive"]))
    performative = draw(st.sampled_from(PERFORMATIVES))
    return (
        f"{draw(conditions())} [{direction}({performative},Ag,{partner_label})] "
        f"{draw(conditions())}"
    )


@st.composite
def dialogue_setups(draw):
    """
    Two ground roles ``alpha`` and ``beta`` with up to four operations each,
    knowledge bases of up to six facts and a success goal for ``alpha``.
    """
    alpha_ops = draw(st.lists(operation_texts("beta"), min_size=1, max_size=4))
    beta_ops = draw(st.lists(operation_texts("alpha"), min_size=1, max_size=4))
    kb_a = draw(st.lists(st.sampled_from(DIALOGUE_FACTS), max_size=6, unique=True))
    kb_b = draw(st.lists(st.sampled_from(DIALOGUE_FACTS), max_size=6, unique=True))
    goal = draw(st.sampled_from(DIALOGUE_FACTS))
    max_steps = draw(st.integers(min_value=1, max_value=5))
    return {
        "alpha": schema("alpha-clause", "alpha", alpha_ops),
        "beta": schema("beta-clause", "beta", beta_ops),
        "kb_a": atoms(*kb_a),
        "kb_b": atoms(*kb_b),
        "goal": parse_atom(goal),
        "max_steps": max_steps,
    }


# Whole scenarios

@st.composite
def scenario_documents(draw) -> Dict[str, Any]:
    """
    A valid scenario: one initiator requesting every service and up to four
    providers, each selling some instance of the services it provides.
    Providers may sell the wrong input, registrations may be missing and
    some providers may be distrusted, so formation can fail at any stage.
    """
    names = SERVICE_NAMES[:draw(st.integers(min_value=1, max_value=len(SERVICE_NAMES)))]
    wanted = {name: draw(st.sampled_from(INPUTS)) for name in names}
    provider_count = draw(st.integers(min_value=1, max_value=4))
    providers = [f"prov{i}" for i in range(1, provider_count + 1)]

    offers: Dict[str, List[str]] = {
        p: draw(st.lists(st.sampled_from(names), min_size=1, unique=True)) for p in providers
    }
    for name in names:
        if not any(name in offered for offered in offers.values()):
            offers[providers[0]].append(name)

    agents = [{
        "id": INITIATOR,
        "roles": [{"protocol": "pc-requester", "label": f"requester({n}(In,Out))"} for n in names],
        "goals": [f"toBuy({n}({wanted[n]},_))" for n in names],
        "knowledge": draw(st.lists(st.sampled_from(["trusted(prov1)", "credit(100)"]), unique=True)),
        "fulfilments": [{"goal": "toBuy(S)", "by": "bought(S)"}],
    }]
    registry = []
    for i, provider in enumerate(providers):
        sold = []
        for name in offers[provider]:
            given = wanted[name] if draw(st.integers(min_value=0, max_value=3)) else draw(st.sampled_from(INPUTS))
            sold.append(f"toSell({name}({given},out{i}.{name}))")
            if draw(st.integers(min_value=0, max_value=5)):
                registry.append({"agent": provider, "service": f"{name}(In,Out)"})
        agents.append({
            "id": provider,
            "roles": [{"protocol": "pc-provider", "label": f"provider({n}(In,Out))"} for n in offers[provider]],
            "goals": sold,
            "knowledge": [],
            "fulfilments": [{"goal": "toSell(S)", "by": "sold(S)"}],
        })

    formation: Dict[str, Any] = {
        "initiator": INITIATOR,
        "seed": draw(st.integers(min_value=0, max_value=9)),
        "max_dialogue_steps": draw(st.integers(min_value=2, max_value=8)),
    }
    deny = draw(st.lists(st.sampled_from(providers), max_size=1, unique=True))
    if deny:
        formation["trust"] = {"deny": deny}
    if draw(st.booleans()):
        formation["exhaustive_negotiation"] = True
        formation["provider_choice"] = draw(st.sampled_from(["first", "seeded"]))
    if draw(st.booleans()):
        formation["guarantees"] = {n: [f"dueBy({n}.out,1400hrs,12.4.09)"] for n in names}

    return {
        "name": f"generated{len(names)}x{provider_count}",
        "protocols": PROTOCOLS,
        "society": {
            "services": [f"{n}(In,Out)" for n in names],
            "ontology": draw(st.lists(st.sampled_from(["sensor(ers1,radar)", "format(kml)"]), unique=True)),
            "agents": agents,
        },
        "registry": registry,
        "formation": formation,
    }


# Contracts

GROUND_SERVICES = tuple(f"{name}({given},out)" for name in SERVICE_NAMES for given in INPUTS)

ground_labels = st.builds(
    lambda name, service: parse_role_label(f"{name}({service})"),
    st.sampled_from(["requester", "provider"]),
    st.sampled_from(GROUND_SERVICES),
)


def _society(draw):
    return scenario_from_dict(draw(scenario_documents())).society


@st.composite
def contract_cases(draw):
    """
    A generated society and a ground contract over up to four parties and
    up to three services. Parties may be strangers to the society and play
    either role for any service, so every rule is broken some of the time.
    """
    society = _society(draw)
    ids = [a.agent_id for a in society.agents] + ["stranger"]
    parties = draw(st.lists(st.sampled_from(ids), min_size=1, max_size=4, unique=True))
    context = tuple(
        ContextEntry(p, tuple(draw(st.lists(ground_labels, min_size=1, max_size=2, unique=True))))
        for p in parties
    )
    sdt = draw(st.lists(st.sampled_from(GROUND_SERVICES), min_size=1, max_size=3, unique=True))
    contract = Contract(f"{INITIATOR}.generated.0", context, Workflow(tuple(parse_service(s) for s in sdt)))
    return society, contract


@st.composite
def draft_cases(draw):
    """A generated society, two distinct members of it, a ground service and a seed."""
    society = _society(draw)
    ids = [a.agent_id for a in society.agents]
    requester, provider = draw(st.lists(st.sampled_from(ids), min_size=2, max_size=2, unique=True))
    service = parse_service(draw(st.sampled_from(GROUND_SERVICES)))
    return society, requester, provider, service, draw(st.integers(min_value=0, max_value=9))
