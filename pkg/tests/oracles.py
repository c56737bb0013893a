"""Independent reference checks shared by the unit, property and acceptance tests."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from dawnet.model import (
    DawNet, FiringRecord, NetState, ValueMode, initial_state, is_goal, successors, valid_fire,
)
from dawnet.errors import FiringError
from dawnet.net import check_k_safe
from dawnet.search import Dedupe, SearchConfig, enumerate_repairs, oracle_cases
from dawnet.trace import check_compliance, inject, new_place_tokens, normalize, project, trace_transition


def brute_force_firings(w: DawNet, s: NetState) -> set:
    """Every (t, choice) accepted by valid_fire, found by trying all value tuples."""
    out = set()
    for t in sorted(w.net.transitions):
        if any(b == t and s.marking[a] < 1 for a, b in w.net.arcs):
            continue
        written = sorted(w.writes(t))
        pools = [list(w.data.domain_of(v)) for v in written]
        for combo in product(*pools):
            choice = dict(zip(written, combo))
            try:
                valid_fire(w, s, t, choice)
            except FiringError:
                continue
            out.add(FiringRecord(t, choice, w.deletes(t)))
    return out


def reference_wfnet_ok(net, start, end) -> bool:
    """Unique source/sink plus forward and backward graph search covering all nodes."""
    nodes = net.places | net.transitions
    pre = {n: set() for n in nodes}
    post = {n: set() for n in nodes}
    for a, b in net.arcs:
        post[a].add(b)
        pre[b].add(a)
    sources = [p for p in net.places if not pre[p]]
    sinks = [p for p in net.places if not post[p]]
    if sources != [start] or sinks != [end]:
        return False

    def reach(x, nxt):
        seen, stack = {x}, [x]
        while stack:
            for y in nxt[stack.pop()]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    return reach(start, post) == nodes and reach(end, pre) == nodes


@dataclass
class TraceWorkflowCheck:
    lhs: set = field(default_factory=set)
    rhs: set = field(default_factory=set)
    repairs: set = field(default_factory=set)
    goal_rhs: set = field(default_factory=set)
    max_new_tokens: int = 0
    wt_cases: int = 0

    @property
    def ok(self) -> bool:
        return self.lhs == self.rhs and self.repairs == self.goal_rhs and self.max_new_tokens <= 1


def trace_workflow_check(w: DawNet, trace, depth: int) -> TraceWorkflowCheck:
    """Compare trace-workflow cases with compliant cases of the normalized net.

    Left: every W^tau case of length <= depth that fires the last trace
    copy, projected. Right: every non-empty case of the normalized net that
    check_compliance accepts. The goal-reaching restriction is compared with
    ``enumerate_repairs``. Tokens on the trace places are tallied along
    every W^tau case.
    """
    wn = normalize(w)
    wt = inject(wn, trace)
    last = trace_transition(len(trace)) if len(trace) else wn.meta.start_t
    res = TraceWorkflowCheck()
    for c in oracle_cases(wt, depth):
        res.wt_cases += 1
        for s in c.states:
            res.max_new_tokens = max(res.max_new_tokens, new_place_tokens(trace, s))
        if last in c.control_flow:
            res.lhs.add(project(trace, c).records)
    for c in oracle_cases(wn, depth):
        if len(c) and check_compliance(wn, c, trace) is not None:
            res.rhs.add(c.records)
            if is_goal(wn, c.final):
                strip = {wn.meta.start_t, wn.meta.end_t}
                res.goal_rhs.add(tuple(r for r in c.records if r.transition not in strip))
    cfg = SearchConfig(value_mode=ValueMode.ENUMERATE, max_depth=depth, dedupe=Dedupe.NONE)
    res.repairs = {r.case.records for r in enumerate_repairs(w, trace, cfg)}
    return res


def safeness_preserved(w: DawNet, trace) -> tuple:
    """(status of W, status of W^tau) for the control-flow nets."""
    wt = inject(normalize(w), trace)
    a = check_k_safe(w.net, w.meta, 1).status
    b = check_k_safe(wt.net, wt.meta, 1).status
    return a, b


def cf_repairs(w: DawNet, trace, mode: ValueMode, depth: int = 64) -> set:
    cfg = SearchConfig(value_mode=mode, max_depth=depth, dedupe=Dedupe.CONTROL_FLOW)
    result = enumerate_repairs(w, trace, cfg)
    return {r.control_flow for r in result}, result.truncated


def case_count(w: DawNet, depth: int) -> int:
    """Number of cases of length <= depth (prefixes included), counted without listing them."""
    memo: dict = {}

    def count(s, d):
        if d == 0:
            return 1
        k = (s, d)
        if k not in memo:
            memo[k] = 1 + sum(count(s2, d - 1) for _, s2 in successors(w, s, ValueMode.ENUMERATE))
        return memo[k]

    return count(initial_state(w), depth)


def fit_depth(nets, max_depth: int, budget: int, floor: int = 4) -> int:
    """Largest depth <= max_depth at which every net has at most ``budget`` cases."""
    d = max_depth
    while d > floor and any(case_count(w, d) > budget for w in nets):
        d -= 1
    return d
