"""Tests for constraint annotations and their satisfiability."""

import pytest
from hypothesis import given, settings

from voform.core.constraints import (
    ConstraintAnnotation,
    IntervalMembership,
    SetMembership,
    constraint_satisfiable,
)
from voform.core.errors import TermError
from voform.core.syntax import parse_constraint, parse_term
from voform.core.terms import EMPTY, Constant, Substitution, Variable
from tests.generators import annotations, partial_bindings
from tests.oracles import annotation_satisfiable


def annotation(*texts: str) -> ConstraintAnnotation:
    return ConstraintAnnotation(tuple(parse_constraint(t) for t in texts))


@pytest.fixture
def sensor_annotation():
    return annotation("Res in [900,1100]", "ST in {radar,optical}")


class TestSatisfiable:
    """Deciding whether an annotation can hold."""

    def test_unbound_annotation(self, sensor_annotation):
        assert sensor_annotation.satisfiable()
        assert sensor_annotation.satisfiable(EMPTY)

    def test_bound_values(self, sensor_annotation):
        assert sensor_annotation.satisfiable(Substitution({"Res": Constant("1000")}))
        assert sensor_annotation.satisfiable(Substitution({"ST": Constant("radar")}))
        assert not sensor_annotation.satisfiable(Substitution({"Res": Constant("1200")}))
        assert not sensor_annotation.satisfiable(Substitution({"ST": Constant("sar")}))

    def test_symbol_never_in_interval(self, sensor_annotation):
        assert not sensor_annotation.satisfiable(Substitution({"Res": Constant("radar")}))

    def test_interval_endpoints_are_closed(self):
        bounds = annotation("Res in [900,1100]")
        assert bounds.satisfiable(Substitution({"Res": Constant("900")}))
        assert bounds.satisfiable(Substitution({"Res": Constant("1100")}))

    def test_empty_interval(self):
        assert not annotation("A in [5,1]").satisfiable()

    def test_intervals_intersect(self):
        assert annotation("A in [0,5]", "A in [5,9]").satisfiable()
        assert not annotation("A in [0,4]", "A in [5,9]").satisfiable()

    def test_interval_and_set_share_a_number(self):
        assert annotation("A in [0,5]", "A in {radar,2}").satisfiable()
        assert not annotation("A in [0,5]", "A in {radar,1000}").satisfiable()

    def test_disjoint_sets(self):
        assert not annotation("A in {radar}", "A in {optical}").satisfiable()

    def test_aliased_variables_pool_their_domains(self):
        constraints = annotation("A in [0,1]", "B in [2,5]")
        assert constraints.satisfiable()
        assert not constraints.satisfiable(Substitution({"A": Variable("B")}))

    def test_structured_value_never_satisfies(self):
        assert not annotation("A in [0,1]").satisfiable(Substitution({"A": parse_term("[1]")}))

    def test_no_constraints(self):
        assert constraint_satisfiable((), EMPTY)
        assert ConstraintAnnotation().is_empty
        assert not ConstraintAnnotation()

    @pytest.mark.slow
    @given(annotations(), partial_bindings())
    @settings(max_examples=500, deadline=None)
    def test_agrees_with_brute_force(self, constraints, bindings):
        """The domain intersection agrees with trying every candidate value."""
        partial = Substitution(bindings)
        assert constraints.satisfiable(partial) == annotation_satisfiable(constraints, partial)


class TestRestrict:
    """Re-expressing an annotation under a substitution."""

    def test_discharges_bound_constraints(self, sensor_annotation):
        restricted = sensor_annotation.restrict(Substitution({"Res": Constant("1000")}))
        assert str(restricted) == "ST in {optical,radar}"

    def test_follows_renames(self, sensor_annotation):
        restricted = sensor_annotation.restrict(Substitution({"Res": Variable("Resolution")}))
        assert restricted.variable_names() == {"Resolution", "ST"}

    def test_violation_raises(self, sensor_annotation):
        with pytest.raises(TermError):
            sensor_annotation.restrict(Substitution({"Res": Constant("1200")}))


def test_duplicates_removed():
    constraint = IntervalMembership(Variable("A"), 0, 1)
    assert len(ConstraintAnnotation((constraint, constraint))) == 1


def test_set_constraints_hold_constants_only():
    with pytest.raises(TermError):
        SetMembership(Variable("A"), frozenset([Variable("B")]))


def test_anonymous_variable_rejected():
    with pytest.raises(TermError):
        IntervalMembership(Variable("_"), 0, 1)
