"""Tests for workflows."""

import pytest

from voform.core.constraints import ConstraintAnnotation
from voform.core.errors import TermError, WorkflowError
from voform.core.syntax import parse_constraint, parse_service
from voform.core.terms import Constant, Substitution
from voform.core.workflow import Workflow, instance_substitution, workflow_is_concrete

ABSTRACT_IMAGE = "satImage([38.0,-9.4,Res,500,Freq,radar,Wave],Image)"


def resolution_bounds() -> ConstraintAnnotation:
    return ConstraintAnnotation((parse_constraint("Res in [900,1100]"),))


@pytest.fixture
def abstract_workflow():
    return Workflow((parse_service(ABSTRACT_IMAGE),), resolution_bounds())


def test_empty_workflow_rejected():
    with pytest.raises(WorkflowError):
        Workflow(())


def test_annotation_must_mention_service_variables():
    with pytest.raises(WorkflowError, match="Res"):
        Workflow((parse_service("satImage(In,Out)"),), resolution_bounds())


def test_unsatisfiable_annotation_rejected():
    bounds = ConstraintAnnotation((parse_constraint("Res in [2,1]"),))
    with pytest.raises(WorkflowError, match="unsatisfiable"):
        Workflow((parse_service(ABSTRACT_IMAGE),), bounds)


def test_concrete_workflow_carries_no_constraints(sat_image):
    with pytest.raises(WorkflowError):
        Workflow((sat_image,), resolution_bounds())


def test_duplicate_services_collapse(sat_image):
    workflow = Workflow((sat_image, sat_image))
    assert workflow.services == (sat_image,)
    assert workflow.service_names() == ("satImage",)


def test_instantiate_to_concrete(abstract_workflow, sat_image):
    subst = instance_substitution(abstract_workflow, Workflow((sat_image,)))
    assert subst is not None

    concrete = abstract_workflow.instantiate(subst)
    assert concrete.services == (sat_image,)
    assert concrete.annotation.is_empty
    assert workflow_is_concrete(concrete)
    assert not abstract_workflow.is_concrete


def test_instantiate_outside_bounds(abstract_workflow):
    with pytest.raises(TermError):
        abstract_workflow.instantiate(Substitution({"Res": Constant("1200")}))


def test_instance_substitution_mismatch(abstract_workflow, sat_image):
    other = parse_service("satImage([38.0,-9.4,1000,500,5,optical,3],x)")
    assert instance_substitution(abstract_workflow, Workflow((other,))) is None
    assert instance_substitution(abstract_workflow, Workflow((sat_image, other))) is None


def test_str(abstract_workflow):
    assert str(abstract_workflow) == "{" + ABSTRACT_IMAGE + "} | Res in [900,1100]"
