"""Tests for terms, substitutions and unification."""

from decimal import Decimal

import pytest
from hypothesis import given, settings, strategies as st

from voform.core.errors import TermError, UnificationError
from voform.core.syntax import parse_formula, parse_service, parse_term
from voform.core.terms import (
    EMPTY,
    Compound,
    Constant,
    FreshVariables,
    InstantiationLevel,
    ListTerm,
    ServiceTerm,
    Substitution,
    Variable,
    apply_substitution,
    compose_substitutions,
    compound,
    instantiation_level,
    is_variant,
    subsumes,
    unify,
    unify_or_raise,
    variable_names,
)
from tests.generators import services, terms

LEVEL_RANK = {
    InstantiationLevel.ABSTRACT: 0,
    InstantiationLevel.PARTIAL: 1,
    InstantiationLevel.CONCRETE: 2,
}


class TestConstants:
    """Constant construction and printing."""

    def test_numbers_keep_their_text(self):
        assert str(Constant("38.0")) == "38.0"
        assert str(Constant("-9.4")) == "-9.4"
        assert Constant("38.0").value == Decimal("38.0")

    def test_python_numbers_become_decimals(self):
        assert Constant(5) == Constant("5")
        assert Constant(0.5).value == Decimal("0.5")

    def test_dotted_symbols(self):
        assert str(Constant("ers1.data")) == "ers1.data"
        assert not Constant("ers1.data").is_number

    @pytest.mark.parametrize("bad", ["Upper", "has space", "", True])
    def test_invalid_constants(self, bad):
        with pytest.raises(TermError):
            Constant(bad)

    def test_binary_compound_must_be_a_service(self):
        with pytest.raises(TermError):
            Compound("f", (Constant("a"), Constant("b")))
        assert isinstance(compound("f", (Constant("a"), Constant("b"))), ServiceTerm)


class TestInstantiationLevel:
    """Abstract, partially instantiated and concrete services."""

    def test_concrete(self):
        service = parse_service("satImage([38.0,-9.4,1000,500,5,optical,3],results.data)")
        assert instantiation_level(service) is InstantiationLevel.CONCRETE

    def test_partial(self):
        service = parse_service("detectOilSpill([a,T],B)")
        assert instantiation_level(service) is InstantiationLevel.PARTIAL

    def test_abstract(self):
        assert parse_service("serviceName(In,Out)").level is InstantiationLevel.ABSTRACT
        assert parse_service("serviceName([A,B],Out)").level is InstantiationLevel.ABSTRACT


class TestUnify:
    """Most general unifiers."""

    def test_binds_variables_both_ways(self):
        left = parse_term("satImage([38.0,Long,Res],Image)")
        right = parse_term("satImage([Lat,-9.4,1000],ers1.data)")
        subst = unify(left, right)
        assert subst is not None
        assert subst.resolve(left) == subst.resolve(right)
        assert subst.resolve(Variable("Res")) == Constant("1000")
        assert subst.resolve(Variable("Lat")) == Constant("38.0")

    def test_clash(self):
        assert unify(parse_term("f(a)"), parse_term("f(b)")) is None
        assert unify(parse_term("[a,b]"), parse_term("[a]")) is None

    def test_occurs_check(self):
        assert unify(Variable("X"), parse_term("f(X)")) is None

    def test_anonymous_variable_never_binds(self):
        subst = unify(parse_term("g(_,X)"), parse_term("g(a,_)"))
        assert subst is not None
        assert len(subst) == 0
        assert unify(parse_term("g(_,_)"), parse_term("g(a,b)")) is not None

    def test_service_does_not_unify_with_atom_of_same_name(self):
        from voform.core.syntax import parse_atom

        assert unify(parse_atom("g(a,b)"), parse_term("g(a,b)")) is None

    def test_extends_existing_substitution(self):
        start = Substitution({"X": Constant("a")})
        assert unify(Variable("X"), Constant("b"), start) is None
        assert unify(Variable("X"), Constant("a"), start) == start

    def test_unify_or_raise(self):
        with pytest.raises(UnificationError) as exc_info:
            unify_or_raise(parse_term("f(a)"), parse_term("f(b)"))
        assert "f(a)" in str(exc_info.value)

    @given(terms(), terms())
    @settings(max_examples=300, deadline=None)
    def test_unify_is_symmetric(self, left, right):
        """unify(a,b) succeeds iff unify(b,a) does, with the same instance up to renaming."""
        forward = unify(left, right)
        backward = unify(right, left)
        assert (forward is None) == (backward is None)
        if forward is not None:
            assert is_variant(forward.resolve(left), backward.resolve(left))

    @given(terms(), terms())
    @settings(max_examples=300, deadline=None)
    def test_unifier_is_idempotent_and_equalizes(self, left, right):
        subst = unify(left, right)
        if subst is None:
            return
        once = subst.resolve(left)
        assert subst.resolve(once) == once
        assert once == subst.resolve(right)

    @given(services(), terms(), terms())
    @settings(max_examples=300, deadline=None)
    def test_substitution_never_lowers_instantiation_level(self, service, input_, output):
        subst = unify(service, ServiceTerm(service.name, input_, output))
        if subst is None:
            return
        assert LEVEL_RANK[instantiation_level(subst.resolve(service))] >= LEVEL_RANK[service.level]


class TestSubstitution:
    """Substitution behaviour."""

    def test_chains_resolve(self):
        subst = Substitution({"X": Variable("Y"), "Y": Constant("a")})
        assert subst.resolve(parse_term("f(X)")) == parse_term("f(a)")
        assert subst.to_dict() == {"X": "a", "Y": "a"}

    def test_cyclic_binding_rejected(self):
        subst = Substitution({"X": parse_term("f(Y)")})
        with pytest.raises(TermError):
            subst.bind(Variable("Y"), parse_term("g(X,a)"))

    @pytest.mark.parametrize("bindings", [
        {"X": ListTerm((Variable("X"),))},
        {"X": Variable("X")},
        {"X": Variable("Y"), "Y": parse_term("f(a,X)")},
        {"X": Variable("Y"), "Y": Variable("X")},
    ])
    def test_cyclic_bindings_rejected_on_construction(self, bindings):
        with pytest.raises(TermError, match="cyclic"):
            Substitution(bindings)

    def test_anonymous_cannot_be_bound(self):
        with pytest.raises(TermError):
            Substitution({"_": Constant("a")})
        assert EMPTY.bind(Variable("_"), Constant("a")) is EMPTY

    def test_restricted(self):
        subst = Substitution({"X": Variable("Y"), "Y": Constant("a"), "Z": Constant("b")})
        assert subst.restricted(["X", "W"]) == Substitution({"X": Constant("a")})

    def test_compose(self):
        first = Substitution({"X": Variable("Y")})
        second = Substitution({"Y": Constant("a"), "Z": Constant("b")})
        composed = compose_substitutions(first, second)
        term = parse_term("f(X,Y,Z)")
        assert composed.resolve(term) == second.resolve(first.resolve(term))

    def test_apply_to_service_and_formula(self):
        subst = Substitution({"Res": Constant("1000"), "ST": Constant("optical")})
        applied = apply_substitution(parse_service("satImage([38.0,-9.4,Res,500,5,ST],Out)"), subst)
        assert applied == parse_service("satImage([38.0,-9.4,1000,500,5,optical],Out)")
        assert str(apply_substitution(parse_formula("toBuy(X) & ~sold(Y)"), Substitution({"X": Variable("Y")}))) \
            == "toBuy(Y) & ~sold(Y)"

    def test_apply_dereferences_chains(self):
        subst = Substitution({"X": parse_term("[a,Y]"), "Y": Constant("b")})
        assert apply_substitution(Variable("X"), subst) == parse_term("[a,b]")
        assert apply_substitution(parse_term("[c,1]"), subst) == parse_term("[c,1]")

    def test_equality_ignores_chain_shape(self):
        assert Substitution({"X": Variable("Y"), "Y": Constant("a")}) == \
            Substitution({"X": Constant("a"), "Y": Constant("a")})


class TestRenaming:
    """Fresh variables, variants and subsumption."""

    def test_fresh_names_avoid_existing(self):
        fresh = FreshVariables(avoid={"_X1"})
        assert fresh.fresh("X") == Variable("_X2")

    def test_rename_standardizes_apart(self):
        term = parse_term("f(X,[Y,X],_)")
        renamed = FreshVariables(avoid=variable_names(term)).rename(term)
        assert is_variant(parse_term("f(X,[Y,X],Z)"), renamed)
        assert not variable_names(renamed) & {"X", "Y"}

    def test_variant(self):
        assert is_variant(parse_term("f(X,Y)"), parse_term("f(A,B)"))
        assert not is_variant(parse_term("f(X,X)"), parse_term("f(A,B)"))
        assert not is_variant(parse_term("f(X)"), parse_term("f(a)"))

    def test_subsumes(self):
        assert subsumes(parse_term("satImage(In,Out)"), parse_term("satImage([a,b],c)"))
        assert subsumes(parse_term("f(X,X)"), parse_term("f(a,a)"))
        assert not subsumes(parse_term("f(X,X)"), parse_term("f(a,b)"))
        assert not subsumes(parse_term("f(a)"), parse_term("f(X)"))

    def test_list_printing(self):
        assert str(ListTerm((Constant("a"), Variable("X")))) == "[a,X]"
        assert str(ListTerm()) == "[]"

    @given(st.sampled_from(["X", "Y"]), terms())
    @settings(max_examples=100, deadline=None)
    def test_variable_subsumes_everything(self, name, term):
        assert subsumes(Variable(name), term)
