"""Action-language encoding of DAW-nets and a reference interpreter."""

from .encoder import encode, guard_table
from .interp import (
    EquivalenceReport, GroundProgram, StateTransition, check_equivalence, ground, is_legal_transition,
    lambda_state, legal_initial_states, reduct, successors, trajectories,
)
from .syntax import Lit, PlanningDomain, Rule, RuleKind, parse, serialize, serialize_domain, serialize_problem
