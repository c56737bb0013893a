"""Explicit-state search: goal reachability and repair enumeration."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional

from .model import (
    DEFAULT_CAP, Case, DawNet, FiringRecord, NetState, ValueMode, initial_state, is_goal,
    replay, successors,
)
from .trace import (
    ComplianceWitness, Trace, check_compliance, inject, is_normalized, normalize, project,
    trace_transition,
)


class Dedupe(str, Enum):
    NONE = "none"
    CONTROL_FLOW = "cf"


@dataclass(frozen=True)
class SearchConfig:
    value_mode: ValueMode = ValueMode.REGIONS
    max_depth: int = 64
    max_states: int = 10**6
    max_solutions: int = 1000
    dedupe: Dedupe = Dedupe.NONE
    cap: int = DEFAULT_CAP


class Reach(str, Enum):
    REACHABLE = "reachable"
    UNREACHABLE = "unreachable"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ReachOutcome:
    status: Reach
    case: Optional[Case] = None
    explored: int = 0


@dataclass(frozen=True)
class Repair:
    case: Case
    trace_alignment: ComplianceWitness
    control_flow: tuple


@dataclass(frozen=True)
class RepairResult:
    repairs: tuple = ()
    truncated: bool = False
    explored: int = 0

    def __iter__(self) -> Iterator[Repair]:
        return iter(self.repairs)

    def __len__(self) -> int:
        return len(self.repairs)

    def __getitem__(self, i: int) -> Repair:
        return self.repairs[i]


def reachable_goal(w: DawNet, cfg: SearchConfig = SearchConfig()) -> ReachOutcome:
    """Breadth-first search for a case ending with one token in ``end`` only."""
    s0 = initial_state(w)
    parent: dict = {s0: None}
    depth = {s0: 0}
    queue = deque([s0])
    cut = False

    def witness(s: NetState) -> Case:
        recs = []
        while parent[s] is not None:
            s, rec = parent[s]
            recs.append(rec)
        return replay(w, reversed(recs))

    if is_goal(w, s0):
        return ReachOutcome(Reach.REACHABLE, Case(s0), 1)
    while queue:
        s = queue.popleft()
        if depth[s] >= cfg.max_depth:
            cut = cut or any(True for _ in successors(w, s, cfg.value_mode, cfg.cap))
            continue
        for rec, s2 in successors(w, s, cfg.value_mode, cfg.cap):
            if s2 in parent:
                continue
            parent[s2] = (s, rec)
            depth[s2] = depth[s] + 1
            if is_goal(w, s2):
                return ReachOutcome(Reach.REACHABLE, witness(s2), len(parent))
            if len(parent) >= cfg.max_states:
                return ReachOutcome(Reach.INCONCLUSIVE, None, len(parent))
            queue.append(s2)
    return ReachOutcome(Reach.INCONCLUSIVE if cut else Reach.UNREACHABLE, None, len(parent))


@dataclass
class _Graph:
    init: NetState
    edges: dict
    dist: dict
    truncated: bool
    explored: int


def _goal_graph(w: DawNet, cfg: SearchConfig) -> _Graph:
    """Explore states within ``max_depth`` and compute each state's distance to the goal."""
    s0 = initial_state(w)
    depth = {s0: 0}
    edges: dict = {}
    queue = deque([s0])
    truncated = False
    while queue:
        s = queue.popleft()
        if depth[s] >= cfg.max_depth:
            continue
        out = []
        for rec, s2 in successors(w, s, cfg.value_mode, cfg.cap):
            out.append((rec, s2))
            if s2 not in depth:
                if len(depth) >= cfg.max_states:
                    truncated = True
                    continue
                depth[s2] = depth[s] + 1
                queue.append(s2)
        edges[s] = [(r, s2) for r, s2 in out if s2 in depth]
    reverse: dict = {}
    for s, out in edges.items():
        for _, s2 in out:
            reverse.setdefault(s2, []).append(s)
    dist = {s: 0 for s in depth if is_goal(w, s)}
    queue = deque(dist)
    while queue:
        s = queue.popleft()
        for p in reverse.get(s, ()):
            if p not in dist:
                dist[p] = dist[s] + 1
                queue.append(p)
    return _Graph(s0, edges, dist, truncated, len(depth))


def goal_cases(w: DawNet, cfg: SearchConfig, must_fire: Optional[str] = None, key=None):
    """Enumerate goal-reaching cases of length <= ``max_depth`` in firing-data order.

    Returns ``(cases, truncated, explored)``. With control-flow dedupe only the
    first case per transition sequence is kept, which is the one with the
    smallest firing data. ``key`` maps a case to its identity; cases with an
    already seen key are dropped and do not count towards ``max_solutions``.
    """
    g = _goal_graph(w, cfg)
    found: list = []
    truncated = g.truncated
    seen_cf: set = set()
    seen_keys: set = set()
    visited_prefix: set = set()
    dedupe = cfg.dedupe is Dedupe.CONTROL_FLOW

    if g.init not in g.dist:
        return found, truncated, g.explored

    path: list = []
    stack = [(g.init, iter(g.edges.get(g.init, ())))]
    if is_goal(w, g.init):
        found.append(Case(g.init))
    while stack:
        s, it = stack[-1]
        step = next(it, None)
        if step is None:
            stack.pop()
            if path:
                path.pop()
            continue
        rec, s2 = step
        d = len(path) + 1
        if s2 not in g.dist or d + g.dist[s2] > cfg.max_depth:
            continue
        if dedupe:
            prefix = (tuple(r.transition for r, _ in path) + (rec.transition,), s2)
            if prefix in visited_prefix:
                continue
            visited_prefix.add(prefix)
        path.append((rec, s2))
        if is_goal(w, s2):
            cf = tuple(r.transition for r, _ in path)
            if must_fire is None or must_fire in cf:
                case = Case(g.init, tuple(path))
                k = key(case) if key is not None else None
                if (not dedupe or cf not in seen_cf) and (k is None or k not in seen_keys):
                    seen_cf.add(cf)
                    seen_keys.add(k)
                    found.append(case)
                    if len(found) >= cfg.max_solutions:
                        truncated = True
                        break
        stack.append((s2, iter(g.edges.get(s2, ()))))
    return found, truncated, g.explored


def enumerate_repairs(w: DawNet, trace: Trace, cfg: SearchConfig = SearchConfig()) -> RepairResult:
    """All complete cases of ``w`` compliant with ``trace``, sorted by control flow then data."""
    added = not is_normalized(w)
    wn = normalize(w)
    wt = inject(wn, trace)
    last = trace_transition(len(trace)) if len(trace) else wn.meta.start_t
    strip = {wn.meta.start_t, wn.meta.end_t} if added else set()

    def original(c: Case) -> tuple:
        # several W^tau cases may project onto the same case (e.g. inside loops)
        return tuple(r for r in project(trace, c).records if r.transition not in strip)

    cases, truncated, explored = goal_cases(wt, cfg, must_fire=last, key=original)
    repairs = []
    for c in cases:
        case = replay(w, original(c))
        witness = check_compliance(w, case, trace)
        if witness is None:  # pragma: no cover - would contradict the construction
            raise AssertionError(f"projected repair is not compliant: {case.control_flow}")
        repairs.append(Repair(case, witness, case.control_flow))
    repairs.sort(key=lambda r: r.case.sort_key())
    if cfg.dedupe is Dedupe.CONTROL_FLOW:
        kept, seen = [], set()
        for r in repairs:
            if r.control_flow not in seen:
                seen.add(r.control_flow)
                kept.append(r)
        repairs = kept
    return RepairResult(tuple(repairs), truncated, explored)


def oracle_cases(w: DawNet, max_len: int, maximal: bool = False) -> list:
    """Every case of length <= ``max_len`` by naive depth-first search.

    With ``maximal`` only cases that are dead or of length ``max_len`` are kept.
    Intended as a test oracle; uses exact value enumeration.
    """
    out = []

    def go(case: Case):
        succ = list(successors(w, case.final)) if len(case) < max_len else []
        if not maximal or not succ:
            out.append(case)
        for rec, s2 in succ:
            go(case.extend(rec, s2))

    go(Case(initial_state(w)))
    return out
