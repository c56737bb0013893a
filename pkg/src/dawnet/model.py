"""DAW-nets: workflow nets with variables, write specifications and guards."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import product
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

from .data import DataModel, sorted_values
from .errors import (
    BadChoice, DomainTooLarge, FiringError, GuardFalse, InvalidStep, NetError,
    NotEnabled, UnknownTransition, UnknownVariable,
)
from .frozen import Assignment, FrozenMap, Value, check_value, value_key
from .guards import TRUE, Const, Eq, Guard, Leq, Var, comparisons, eval_guard, variables
from .net import Marking, Observability, PetriNet, WfNetMeta, fire, initial_marking, is_enabled

DEFAULT_CAP = 10_000


@dataclass(frozen=True)
class ExplicitSet:
    values: frozenset

    def __post_init__(self):
        vals = frozenset(check_value(v) for v in self.values)
        if not vals:
            raise NetError("an explicit write set must be non-empty; use Delete to undefine")
        object.__setattr__(self, "values", vals)

    def __contains__(self, v: object) -> bool:
        return not isinstance(v, bool) and v in self.values

    def __iter__(self) -> Iterator[Value]:
        return iter(sorted_values(self.values))

    def size(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class IntInterval:
    lo: int
    hi: int

    def __post_init__(self):
        if isinstance(self.lo, bool) or isinstance(self.hi, bool) or self.lo > self.hi:
            raise NetError(f"bad interval [{self.lo}, {self.hi}]")

    def __contains__(self, v: object) -> bool:
        return isinstance(v, int) and not isinstance(v, bool) and self.lo <= v <= self.hi

    def __iter__(self) -> Iterator[int]:
        return iter(range(self.lo, self.hi + 1))

    def size(self) -> int:
        return self.hi - self.lo + 1


@dataclass(frozen=True)
class Delete:
    """Write specification that makes a variable undefined."""

    def __contains__(self, v: object) -> bool:
        return False

    def __iter__(self) -> Iterator[Value]:
        return iter(())

    def size(self) -> int:
        return 0


DELETE = Delete()
WriteSet = Union[ExplicitSet, IntInterval, Delete]


class ValueMode(str, Enum):
    ENUMERATE = "enumerate"
    REGIONS = "regions"


@dataclass(frozen=True)
class DawNet:
    """A workflow net with a data model, write specifications ``wr`` and guards ``gd``.

    Missing guards default to ``true``; missing observability to *sometimes*.
    """

    net: PetriNet
    meta: WfNetMeta
    data: DataModel
    wr: Mapping[str, Mapping[str, WriteSet]] = field(default_factory=dict)
    gd: Mapping[str, Guard] = field(default_factory=dict)
    name: str = "model"

    def __post_init__(self):
        ts = self.net.transitions
        for t in list(self.wr) + list(self.gd) + list(self.meta.observability):
            if t not in ts:
                raise UnknownTransition(t)
        wr = {t: dict(self.wr.get(t, {})) for t in sorted(ts)}
        for t, spec in wr.items():
            for v, ws in spec.items():
                dom = self.data.domain_of(v)
                for x in (ws.lo, ws.hi) if isinstance(ws, IntInterval) else ws:
                    if x not in dom:
                        raise NetError(f"wr({t})({v}) contains {x!r} outside domain {dom.name!r}")
        gd = {t: self.gd.get(t, TRUE) for t in sorted(ts)}
        for t, g in gd.items():
            for v in variables(g):
                if v not in self.data.dm:
                    raise UnknownVariable(f"guard of {t} uses undeclared variable {v!r}")
        obs = {t: Observability(self.meta.observability.get(t, Observability.SOMETIMES)) for t in sorted(ts)}
        object.__setattr__(self, "wr", wr)
        object.__setattr__(self, "gd", gd)
        object.__setattr__(self, "meta", WfNetMeta(
            self.meta.start, self.meta.end, obs, self.meta.start_t, self.meta.end_t))

    def writes(self, t: str) -> frozenset:
        return frozenset(v for v, ws in self.wr[t].items() if not isinstance(ws, Delete))

    def deletes(self, t: str) -> frozenset:
        return frozenset(v for v, ws in self.wr[t].items() if isinstance(ws, Delete))

    @cached_property
    def region_table(self) -> dict:
        return _region_table(self)

    def replace(self, **changes) -> "DawNet":
        fields = dict(net=self.net, meta=self.meta, data=self.data, wr=self.wr, gd=self.gd, name=self.name)
        fields.update(changes)
        return DawNet(**fields)


@dataclass(frozen=True)
class NetState:
    marking: Marking
    eta: Assignment

    def sort_key(self) -> tuple:
        return (self.marking.sort_key(), self.eta.sort_key())


@dataclass(frozen=True)
class FiringRecord:
    transition: str
    written: FrozenMap = field(default_factory=FrozenMap)
    deleted: frozenset = frozenset()

    def __post_init__(self):
        if not isinstance(self.written, FrozenMap):
            object.__setattr__(self, "written", FrozenMap(self.written))
        object.__setattr__(self, "deleted", frozenset(self.deleted))

    def sort_key(self) -> tuple:
        return (self.transition, self.written.sort_key(), tuple(sorted(self.deleted)))

    def __str__(self) -> str:
        parts = [f"{k}={v}" for k, v in self.written.items_sorted()]
        parts += [f"-{k}" for k in sorted(self.deleted)]
        return f"{self.transition}[{', '.join(parts)}]" if parts else self.transition


@dataclass(frozen=True)
class Case:
    """A run from ``initial``: each step pairs a firing with the state it produces."""

    initial: NetState
    steps: tuple = ()

    @property
    def records(self) -> tuple:
        return tuple(r for r, _ in self.steps)

    @property
    def control_flow(self) -> tuple:
        return tuple(r.transition for r, _ in self.steps)

    @property
    def states(self) -> tuple:
        return (self.initial,) + tuple(s for _, s in self.steps)

    @property
    def final(self) -> NetState:
        return self.steps[-1][1] if self.steps else self.initial

    def __len__(self) -> int:
        return len(self.steps)

    def extend(self, record: FiringRecord, state: NetState) -> "Case":
        return Case(self.initial, self.steps + ((record, state),))

    def sort_key(self) -> tuple:
        return (self.control_flow, tuple(r.sort_key() for r in self.records))


def initial_state(w: DawNet) -> NetState:
    return NetState(initial_marking(w.meta), Assignment())


def is_goal(w: DawNet, s: NetState) -> bool:
    return s.marking == Marking({w.meta.end: 1})


def valid_fire(w: DawNet, s: NetState, t: str, choice: Optional[Mapping[str, Value]] = None) -> NetState:
    """Fire ``t`` with the given values for its written variables."""
    if t not in w.net.transitions:
        raise UnknownTransition(t)
    if not is_enabled(w.net, s.marking, t):
        raise NotEnabled(f"{t} is not enabled")
    if not eval_guard(w.gd[t], w.data, s.eta):
        raise GuardFalse(f"guard of {t} is false")
    choice = dict(choice or {})
    written = w.writes(t)
    if set(choice) != written:
        raise BadChoice(f"{t} writes {sorted(written)}, choice gives {sorted(choice)}")
    for v, x in choice.items():
        if x not in w.wr[t][v]:
            raise BadChoice(f"{x!r} is not in wr({t})({v})")
    eta = s.eta.updated(choice, removed=w.deletes(t))
    return NetState(fire(w.net, s.marking, t), eta)


def apply_record(w: DawNet, s: NetState, rec: FiringRecord) -> NetState:
    if rec.transition not in w.net.transitions:
        raise UnknownTransition(rec.transition)
    if rec.deleted != w.deletes(rec.transition):
        raise BadChoice(f"{rec.transition} deletes {sorted(w.deletes(rec.transition))}, "
                        f"record says {sorted(rec.deleted)}")
    return valid_fire(w, s, rec.transition, rec.written)


def _candidates(w: DawNet, t: str, v: str, mode: ValueMode, cap: int) -> list:
    ws = w.wr[t][v]
    if isinstance(ws, ExplicitSet):
        return list(ws)
    if mode is ValueMode.REGIONS:
        return list(w.region_table[(t, v)])
    if ws.size() > cap:
        raise DomainTooLarge(f"wr({t})({v}) has {ws.size()} values, cap is {cap}")
    return list(ws)


def enabled_firings(
    w: DawNet,
    s: NetState,
    mode: ValueMode = ValueMode.ENUMERATE,
    cap: int = DEFAULT_CAP,
) -> list:
    """All firings possible from ``s``, sorted by transition then values."""
    out = []
    for t in sorted(w.net.transitions):
        if not is_enabled(w.net, s.marking, t) or not eval_guard(w.gd[t], w.data, s.eta):
            continue
        wvars = sorted(w.writes(t))
        dels = w.deletes(t)
        pools = [_candidates(w, t, v, mode, cap) for v in wvars]
        for combo in product(*pools):
            out.append(FiringRecord(t, FrozenMap(zip(wvars, combo)), dels))
    return out


def successors(w: DawNet, s: NetState, mode: ValueMode = ValueMode.ENUMERATE, cap: int = DEFAULT_CAP):
    """Yield ``(record, next_state)`` for every enabled firing."""
    m_cache: dict = {}
    for rec in enabled_firings(w, s, mode, cap):
        t = rec.transition
        if t not in m_cache:
            m_cache[t] = fire(w.net, s.marking, t)
        eta = s.eta.updated(rec.written, removed=rec.deleted)
        yield rec, NetState(m_cache[t], eta)


def replay(w: DawNet, records: Iterable[FiringRecord], initial: Optional[NetState] = None) -> Case:
    s = initial if initial is not None else initial_state(w)
    case = Case(s)
    for i, rec in enumerate(records):
        try:
            s = apply_record(w, s, rec)
        except (FiringError, UnknownTransition) as exc:
            raise InvalidStep(i, exc) from exc
        case = case.extend(rec, s)
    return case


# value regions --------------------------------------------------------------

def _region_table(w: DawNet) -> dict:
    """Representative values for every interval write ``(t, v)``.

    Cut points come from integer constants compared with the variable in any
    guard. ``v <= c`` splits at ``c+1``, ``c <= v`` at ``c`` and ``v = c`` at
    both. Each region contributes its least element. Variables compared with
    other variables form groups; a group whose intervals fit under the
    enumeration cap is enumerated exactly, otherwise the regions of the whole
    group are merged and each region contributes its two smallest and two
    largest elements.
    """
    parent: dict = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            x = parent[x]
        return x

    starts: dict = {v: set() for v in w.data.dm}
    for g in w.gd.values():
        for c in comparisons(g):
            l, r = c.left, c.right
            if isinstance(l, Var) and isinstance(r, Var):
                parent[find(l.name)] = find(r.name)
                continue
            if isinstance(l, Var) and isinstance(r, Const) and isinstance(r.value, int):
                v, k = l.name, r.value
                cuts = {k, k + 1} if isinstance(c, Eq) else {k + 1}
            elif isinstance(r, Var) and isinstance(l, Const) and isinstance(l.value, int):
                v, k = r.name, l.value
                cuts = {k, k + 1} if isinstance(c, Eq) else {k}
            else:
                continue
            starts[v].update(cuts)

    groups: dict = {}
    for v in w.data.dm:
        groups.setdefault(find(v), set()).add(v)

    table = {}
    for t, spec in w.wr.items():
        for v, ws in spec.items():
            if not isinstance(ws, IntInterval):
                continue
            group = groups[find(v)]
            if len(group) == 1:
                cuts = {c for c in starts[v] if ws.lo < c <= ws.hi}
                table[(t, v)] = tuple(sorted({ws.lo} | cuts))
                continue
            intervals = [(t2, u, spec2[u]) for t2, spec2 in w.wr.items() for u in group
                         if u in spec2 and isinstance(spec2[u], IntInterval)]
            if all(iv.size() <= DEFAULT_CAP for _, _, iv in intervals):
                table[(t, v)] = tuple(range(ws.lo, ws.hi + 1))
                continue
            merged = set()
            for u in group:
                merged |= starts[u]
            for _, _, iv in intervals:
                merged |= {iv.lo, iv.hi + 1}
            for t2, spec2 in w.wr.items():
                for u in group:
                    if isinstance(spec2.get(u), ExplicitSet):
                        merged |= {x for x in spec2[u].values if isinstance(x, int)}
                        merged |= {x + 1 for x in spec2[u].values if isinstance(x, int)}
            bounds = sorted({ws.lo} | {c for c in merged if ws.lo < c <= ws.hi}) + [ws.hi + 1]
            reps = set()
            for a, b in zip(bounds, bounds[1:]):
                reps |= {x for x in (a, a + 1, b - 2, b - 1) if a <= x < b}
            table[(t, v)] = tuple(sorted(reps))
    return table


def expand_intervals(w: DawNet, mode: ValueMode = ValueMode.ENUMERATE, cap: int = DEFAULT_CAP) -> DawNet:
    """Replace interval writes by explicit sets (all values or region representatives)."""
    wr = {}
    for t, spec in w.wr.items():
        wr[t] = {}
        for v, ws in spec.items():
            if isinstance(ws, IntInterval):
                wr[t][v] = ExplicitSet(frozenset(_candidates(w, t, v, mode, cap)))
            else:
                wr[t][v] = ws
    return w.replace(wr=wr)
