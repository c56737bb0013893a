"""Partial traces, compliance checking and the trace workflow construction.

An event names a transition and carries a payload: values observed after
the firing and the set of deleted variables. Payload entries on variables
that the transition writes constrain the written value; entries on other
variables are read-only observations of the current value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Sequence

from .errors import InvalidCase, InvalidStep, NetError, NotATraceWorkflowCase, PayloadViolatesWr, UnknownTransition
from .frozen import Assignment, FrozenMap, Value, check_value
from .guards import FALSE, TRUE, Const, Def, Eq, Var, conj
from .model import (
    Case, DawNet, Delete, ExplicitSet, FiringRecord, NetState, replay,
)
from .net import Marking, Observability, PetriNet, WfNetMeta

TRACE_PREFIX = "__trace."
NORM_START = "__start"
NORM_END = "__end"
NORM_START_T = "__start_t"
NORM_END_T = "__end_t"


def trace_place(i: int) -> str:
    return f"{TRACE_PREFIX}p{i}"


def trace_transition(i: int) -> str:
    return f"{TRACE_PREFIX}t{i}"


@dataclass(frozen=True)
class Event:
    transition: str
    writes: FrozenMap = field(default_factory=FrozenMap)
    deletes: frozenset = frozenset()

    def __post_init__(self):
        if not isinstance(self.writes, Assignment):
            object.__setattr__(self, "writes", Assignment(self.writes))
        object.__setattr__(self, "deletes", frozenset(self.deletes))
        both = set(self.writes) & self.deletes
        if both:
            raise ValueError(f"event on {self.transition}: {sorted(both)} both written and deleted")

    def __str__(self) -> str:
        parts = [f"{k}={v}" for k, v in self.writes.items_sorted()] + [f"-{k}" for k in sorted(self.deletes)]
        return f"{self.transition}[{', '.join(parts)}]" if parts else self.transition


@dataclass(frozen=True)
class Trace:
    events: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def __getitem__(self, i: int) -> Event:
        return self.events[i]


@dataclass(frozen=True)
class ComplianceWitness:
    """``gamma[i]`` is the 0-based case step that event ``i`` is mapped to."""

    gamma: tuple


def firing_complies(w: DawNet, before: NetState, rec: FiringRecord, after: NetState, e: Event) -> bool:
    """Literal firing-compliance test between one case step and one event."""
    t = rec.transition
    if t != e.transition:
        return False
    if e.deletes != w.deletes(t):
        return False
    expected_dom = (set(e.writes) | set(before.eta)) - e.deletes
    if set(after.eta) != expected_dom:
        return False
    return all(after.eta.get(v) == x and type(after.eta.get(v)) is type(x) for v, x in e.writes.items())


def check_compliance(w: DawNet, case: Case, trace: Trace) -> Optional[ComplianceWitness]:
    """Find the earliest order-preserving injective embedding of ``trace`` in ``case``.

    Every step firing an always-observable transition must be matched.
    Returns ``None`` when no embedding exists.
    """
    try:
        replayed = replay(w, case.records, case.initial)
    except InvalidStep as exc:
        raise InvalidCase(str(exc)) from exc
    if replayed.states != case.states:
        raise InvalidCase("case states do not match its firings")

    states = case.states
    steps = case.records
    events = trace.events
    k, n = len(steps), len(events)
    always = [w.meta.observability_of(r.transition) is Observability.ALWAYS for r in steps]

    # suffix feasibility table: ok[i][j] - events i.. embed into steps j..
    ok = [[False] * (k + 1) for _ in range(n + 1)]
    ok[n][k] = True
    for j in range(k - 1, -1, -1):
        ok[n][j] = ok[n][j + 1] and not always[j]
    for i in range(n - 1, -1, -1):
        for j in range(k - 1, -1, -1):
            match = ok[i + 1][j + 1] and firing_complies(w, states[j], steps[j], states[j + 1], events[i])
            skip = ok[i][j + 1] and not always[j]
            ok[i][j] = match or skip
    if not ok[0][0]:
        return None

    gamma, i = [], 0
    for j in range(k):
        if i < n and ok[i + 1][j + 1] and firing_complies(w, states[j], steps[j], states[j + 1], events[i]):
            gamma.append(j)
            i += 1
    return ComplianceWitness(tuple(gamma))


def is_normalized(w: DawNet) -> bool:
    return w.meta.start_t is not None and w.meta.end_t is not None


def normalize(w: DawNet) -> DawNet:
    """Add fresh start/end places with silent start_t/end_t transitions. Idempotent."""
    if is_normalized(w):
        return w
    taken = w.net.places | w.net.transitions
    for name in (NORM_START, NORM_END, NORM_START_T, NORM_END_T):
        if name in taken:
            raise NetError(f"cannot normalize: identifier {name!r} already used")
    s, e = w.meta.start, w.meta.end
    net = PetriNet(
        w.net.places | {NORM_START, NORM_END},
        w.net.transitions | {NORM_START_T, NORM_END_T},
        w.net.arcs | {(NORM_START, NORM_START_T), (NORM_START_T, s), (e, NORM_END_T), (NORM_END_T, NORM_END)},
    )
    obs = dict(w.meta.observability)
    obs[NORM_START_T] = obs[NORM_END_T] = Observability.NEVER
    meta = WfNetMeta(NORM_START, NORM_END, obs, NORM_START_T, NORM_END_T)
    gd = dict(w.gd)
    gd[NORM_START_T] = gd[NORM_END_T] = TRUE
    wr = dict(w.wr)
    wr[NORM_START_T] = wr[NORM_END_T] = {}
    return DawNet(net, meta, w.data, wr, gd, w.name)


def check_event(w: DawNet, e: Event) -> None:
    """Raise unless some firing of ``e.transition`` could comply with ``e``."""
    t = e.transition
    if t not in w.net.transitions:
        raise UnknownTransition(t)
    if e.deletes != w.deletes(t):
        raise PayloadViolatesWr(
            f"event on {t} deletes {sorted(e.deletes)} but {t} deletes {sorted(w.deletes(t))}")
    for v, x in e.writes.items():
        if v not in w.data.dm:
            raise PayloadViolatesWr(f"event on {t} mentions undeclared variable {v!r}")
        ws = w.wr[t].get(v)
        if ws is None:
            if x not in w.data.domain_of(v):
                raise PayloadViolatesWr(f"event on {t}: {x!r} is outside the domain of {v}")
        elif x not in ws:
            raise PayloadViolatesWr(f"event on {t}: {x!r} is not in wr({t})({v})")


def inject(w: DawNet, trace: Trace) -> DawNet:
    """Build the trace workflow of a normalized net.

    One copy ``__trace.t{i}`` of each event's transition is chained through
    fresh places ``__trace.p{i}`` between start_t and end_t. Copies write the
    observed values; always-observable originals are disabled.
    """
    if not is_normalized(w):
        raise NetError("inject expects a normalized net (call normalize first)")
    for e in trace:
        check_event(w, e)
    n = len(trace)
    new_places = {trace_place(i) for i in range(n + 1)}
    new_ts = {trace_transition(i) for i in range(1, n + 1)}
    clash = (new_places | new_ts) & (w.net.places | w.net.transitions)
    if clash:
        raise NetError(f"identifiers reserved for trace injection already used: {sorted(clash)}")

    arcs = set(w.net.arcs)
    arcs |= {(w.meta.start_t, trace_place(0)), (trace_place(n), w.meta.end_t)}
    wr = {t: dict(spec) for t, spec in w.wr.items()}
    gd = {t: (FALSE if w.meta.observability_of(t) is Observability.ALWAYS else g) for t, g in w.gd.items()}
    obs = dict(w.meta.observability)
    for i, e in enumerate(trace, start=1):
        t, te = e.transition, trace_transition(i)
        for p in w.net.preset(t):
            arcs.add((p, te))
        for p in w.net.postset(t):
            arcs.add((te, p))
        arcs |= {(trace_place(i - 1), te), (te, trace_place(i))}
        spec, extra = {}, []
        for v, ws in w.wr[t].items():
            if isinstance(ws, Delete):
                spec[v] = ws
            elif v in e.writes:
                spec[v] = ExplicitSet(frozenset([e.writes[v]]))
            else:
                # written but unreported: keep the choice, but the variable must already exist
                spec[v] = ws
                extra.append(Def(v))
        for v in sorted(set(e.writes) - set(w.wr[t])):
            extra.append(Eq(Var(v), Const(e.writes[v])))
        wr[te] = spec
        gd[te] = conj(w.gd[t], *extra) if extra else w.gd[t]
        obs[te] = Observability.NEVER
    net = PetriNet(w.net.places | new_places, w.net.transitions | new_ts, arcs)
    meta = WfNetMeta(w.meta.start, w.meta.end, obs, w.meta.start_t, w.meta.end_t)
    return DawNet(net, meta, w.data, wr, gd, w.name)


def project(trace: Trace, case: Case) -> Case:
    """Map a trace-workflow case back onto the original net."""
    n = len(trace)
    rename = {trace_transition(i): trace[i - 1].transition for i in range(1, n + 1)}
    new_places = {trace_place(i) for i in range(n + 1)}

    def strip(s: NetState) -> NetState:
        return NetState(Marking({p: c for p, c in s.marking.items() if p not in new_places}), s.eta)

    steps = []
    for rec, s in case.steps:
        t = rec.transition
        if t.startswith(TRACE_PREFIX):
            if t not in rename:
                raise NotATraceWorkflowCase(f"{t} is not a transition of this trace workflow")
            t = rename[t]
        steps.append((FiringRecord(t, rec.written, rec.deleted), strip(s)))
    for s in case.states:
        if any(p.startswith(TRACE_PREFIX) and p not in new_places for p in s.marking):
            raise NotATraceWorkflowCase("case marks places unknown to this trace workflow")
    return Case(strip(case.initial), tuple(steps))


def new_place_tokens(trace: Trace, s: NetState) -> int:
    return s.marking.total(trace_place(i) for i in range(len(trace) + 1))
