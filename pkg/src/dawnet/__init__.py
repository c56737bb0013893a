"""Repairing partial traces of data-aware workflow nets."""

from .data import DataModel, Domain
from .guards import parse_guard, pretty, eval_guard, substitute
from .model import (
    Case, DawNet, DELETE, ExplicitSet, FiringRecord, IntInterval, NetState, ValueMode,
    enabled_firings, initial_state, replay, valid_fire,
)
from .net import Marking, Observability, PetriNet, WfNetMeta, check_k_safe, fire, validate_wfnet
from .search import Dedupe, SearchConfig, enumerate_repairs, oracle_cases, reachable_goal
from .trace import Event, Trace, check_compliance, inject, normalize, project

__version__ = "0.1.0"
