"""Core model: terms, formulas, constraints and workflows."""

from voform.core.constraints import (
    ConstraintAnnotation,
    IntervalMembership,
    SetMembership,
    constraint_satisfiable,
)
from voform.core.errors import (
    NonGroundPostcondition,
    TermError,
    TermSyntaxError,
    UnificationError,
    WorkflowError,
)
from voform.core.formulas import TRUE, And, Atom, Formula, Not
from voform.core.report import CheckReport, CheckResult
from voform.core.terms import (
    EMPTY,
    Compound,
    Constant,
    InstantiationLevel,
    ListTerm,
    ServiceTerm,
    Substitution,
    Term,
    Variable,
    apply_substitution,
    instantiation_level,
    unify,
    unify_or_raise,
)
from voform.core.workflow import Workflow, workflow_is_concrete

__all__ = [
    'And', 'Atom', 'CheckReport', 'CheckResult', 'Compound', 'Constant',
    'ConstraintAnnotation', 'EMPTY', 'Formula', 'InstantiationLevel',
    'IntervalMembership', 'ListTerm', 'NonGroundPostcondition', 'Not',
    'ServiceTerm', 'SetMembership', 'Substitution', 'TRUE', 'Term',
    'TermError', 'TermSyntaxError', 'UnificationError', 'Variable',
    'Workflow', 'WorkflowError', 'apply_substitution', 'constraint_satisfiable',
    'instantiation_level', 'unify', 'unify_or_raise', 'workflow_is_concrete',
]
