"""Random DAW-nets and compliant traces for property tests.

Nets are grown from ``start -> T1 -> p1 -> T2 -> end`` by refinements that keep a net
sound and 1-safe: sequencing a transition or a place, duplicating a
transition (choice), duplicating an inner place (concurrency) and adding a
self-loop on an inner place.
"""

from __future__ import annotations

import random

from dawnet.data import NATURAL, DataModel, Domain
from dawnet.guards import And, Const, Def, Eq, Leq, Not, Var
from dawnet.model import DELETE, Case, DawNet, ExplicitSet, IntInterval, ValueMode, initial_state, is_goal, successors
from dawnet.net import Observability, PetriNet, WfNetMeta
from dawnet.trace import Event, Trace


class _Skeleton:
    def __init__(self):
        self.places = ["start", "end", "p1"]
        self.transitions = ["T1", "T2"]
        self.arcs = {("start", "T1"), ("T1", "p1"), ("p1", "T2"), ("T2", "end")}

    def fresh_place(self) -> str:
        p = f"p{len(self.places) - 1}"
        self.places.append(p)
        return p

    def fresh_transition(self) -> str:
        t = f"T{len(self.transitions) + 1}"
        self.transitions.append(t)
        return t

    def pre(self, n):
        return {a for a, b in self.arcs if b == n}

    def post(self, n):
        return {b for a, b in self.arcs if a == n}

    def inner_places(self):
        return [p for p in self.places if p not in ("start", "end")]

    # refinements -------------------------------------------------------------

    def seq_transition(self, rng):
        t = rng.choice(self.transitions)
        m, t2 = self.fresh_place(), self.fresh_transition()
        for q in self.post(t):
            self.arcs.discard((t, q))
            self.arcs.add((t2, q))
        self.arcs |= {(t, m), (m, t2)}

    def seq_place(self, rng):
        p = rng.choice(self.inner_places())
        t, p2 = self.fresh_transition(), self.fresh_place()
        for u in self.post(p):
            self.arcs.discard((p, u))
            self.arcs.add((p2, u))
        self.arcs |= {(p, t), (t, p2)}

    def choice(self, rng):
        t = rng.choice(self.transitions)
        t2 = self.fresh_transition()
        self.arcs |= {(p, t2) for p in self.pre(t)} | {(t2, q) for q in self.post(t)}

    def parallel(self, rng):
        p = rng.choice(self.inner_places())
        p2 = self.fresh_place()
        self.arcs |= {(u, p2) for u in self.pre(p)} | {(p2, u) for u in self.post(p)}
        # sequence the copy so the branch does real work
        t, p3 = self.fresh_transition(), self.fresh_place()
        for u in self.post(p2):
            self.arcs.discard((p2, u))
            self.arcs.add((p3, u))
        self.arcs |= {(p2, t), (t, p3)}

    def self_loop(self, rng):
        p = rng.choice(self.inner_places())
        t = self.fresh_transition()
        self.arcs |= {(p, t), (t, p)}


def random_skeleton(rng: random.Random, max_places: int = 10, max_transitions: int = 8):
    sk = _Skeleton()
    target = rng.randint(2, max_transitions)
    ops = [
        (sk.seq_transition, 1, 1, 4),
        (sk.seq_place, 1, 1, 3),
        (sk.choice, 0, 1, 3),
        (sk.parallel, 2, 1, 2),
        (sk.self_loop, 0, 1, 1),
    ]
    stalls = 0
    while len(sk.transitions) < target and stalls < 20:
        op, dp, dt, weight = rng.choices(ops, weights=[o[3] for o in ops])[0]
        if len(sk.places) + dp > max_places or len(sk.transitions) + dt > max_transitions:
            stalls += 1
            continue
        op(rng)
    return sk


# data ----------------------------------------------------------------------------

ATOMS = ("a", "b", "c")


def _random_domains(rng, n_vars: int, intervals: bool, universe: int):
    domains, dm = {}, {}
    for i in range(n_vars):
        v = f"v{i}"
        if intervals:
            hi = rng.randint(3, universe - 1)
            name = f"d{i}"
            domains[name] = Domain(name, lo=0, hi=hi, order=NATURAL)
        else:
            kind = rng.choice(["int", "int", "atom", "chain"])
            name = f"d{i}"
            if kind == "int":
                domains[name] = Domain(name, frozenset(range(5)), order=NATURAL)
            elif kind == "atom":
                domains[name] = Domain(name, frozenset(ATOMS))
            else:
                domains[name] = Domain(name, frozenset(ATOMS), order=frozenset({("a", "b"), ("b", "c"), ("a", "c")}))
        dm[v] = name
    if n_vars == 2 and rng.random() < 0.4:
        # share a domain so that variable-variable comparisons are meaningful
        dm["v1"] = dm["v0"]
    return DataModel(domains, dm)


def _values(dom: Domain) -> list:
    return list(dom)


def _random_atom(rng, data: DataModel):
    vs = sorted(data.dm)
    v = rng.choice(vs)
    dom = data.domain_of(v)
    options = ["def", "eq"]
    if dom.ordered:
        options.append("leq")
    same = [u for u in vs if u != v and data.dm[u] == data.dm[v]]
    if same:
        options.append("vv")
    kind = rng.choice(options)
    if kind == "def":
        return Def(v)
    if kind == "vv":
        u = rng.choice(same)
        return (Leq if dom.ordered and rng.random() < 0.5 else Eq)(Var(v), Var(u))
    c = Const(rng.choice(_values(dom)) if not dom.is_interval else rng.randint(dom.lo, dom.hi))
    if kind == "leq":
        return Leq(Var(v), c) if rng.random() < 0.6 else Leq(c, Var(v))
    return Eq(Var(v), c)


def _random_guard(rng, data: DataModel, depth: int = 2):
    r = rng.random()
    if depth == 0 or r < 0.5:
        return _random_atom(rng, data)
    if r < 0.7:
        return Not(_random_guard(rng, data, depth - 1))
    return And(_random_guard(rng, data, depth - 1), _random_guard(rng, data, depth - 1))


def _random_writes(rng, dom: Domain, intervals: bool):
    if dom.is_interval:
        if intervals and rng.random() < 0.7:
            lo = rng.randint(dom.lo, dom.hi)
            hi = rng.randint(lo, min(dom.hi, lo + rng.randint(0, dom.hi)))
            return IntInterval(lo, hi)
        k = rng.randint(1, 3)
        return ExplicitSet(frozenset(rng.randint(dom.lo, dom.hi) for _ in range(k)))
    vals = _values(dom)
    return ExplicitSet(frozenset(rng.sample(vals, rng.randint(1, min(3, len(vals))))))


def random_dawnet(
    rng: random.Random,
    max_places: int = 10,
    max_transitions: int = 8,
    max_vars: int = 2,
    intervals: bool = False,
    universe: int = 200,
    name: str = "random",
) -> DawNet:
    sk = random_skeleton(rng, max_places, max_transitions)
    net = PetriNet(frozenset(sk.places), frozenset(sk.transitions), frozenset(sk.arcs))
    data = _random_domains(rng, rng.randint(1 if intervals else 0, max_vars), intervals, universe)
    wr, gd, obs = {}, {}, {}
    for t in sk.transitions:
        spec = {}
        for v in sorted(data.dm):
            r = rng.random()
            if r < 0.35:
                spec[v] = _random_writes(rng, data.domain_of(v), intervals)
            elif r < 0.42:
                spec[v] = DELETE
        wr[t] = spec
        if data.dm and rng.random() < 0.5:
            gd[t] = _random_guard(rng, data)
        r = rng.random()
        if r < 0.15:
            obs[t] = Observability.ALWAYS
        elif r < 0.3:
            obs[t] = Observability.NEVER
    meta = WfNetMeta("start", "end", obs)
    return DawNet(net, meta, data, wr, gd, name)


# cases and traces -----------------------------------------------------------------

def random_case(w: DawNet, rng: random.Random, max_len: int = 10, attempts: int = 30) -> Case:
    """A random walk; goal-reaching walks are preferred."""
    last = Case(initial_state(w))
    for _ in range(attempts):
        case = Case(initial_state(w))
        while len(case) < max_len:
            succ = list(successors(w, case.final, ValueMode.ENUMERATE))
            if not succ:
                break
            rec, s2 = rng.choice(succ)
            case = case.extend(rec, s2)
            if is_goal(w, s2):
                return case
        last = case
    return last


def trace_of(w: DawNet, case: Case, rng: random.Random, keep: float = 0.5) -> Trace:
    """A trace the case complies with: a subsequence covering every always-observable step."""
    events = []
    states = case.states
    for j, rec in enumerate(case.records):
        t = rec.transition
        if w.meta.observability_of(t) is not Observability.ALWAYS and rng.random() >= keep:
            continue
        before, after = states[j], states[j + 1]
        must = set(w.writes(t)) - set(before.eta)
        payload = {v: after.eta[v] for v in after.eta if v in must or rng.random() < 0.4}
        events.append(Event(t, payload, w.deletes(t)))
    return Trace(tuple(events))


def mutate_trace(w: DawNet, trace: Trace, rng: random.Random) -> Trace:
    """Perturb a trace while keeping every event acceptable to ``inject``."""
    events = list(trace.events)
    r = rng.random()
    if r < 0.3 and len(events) >= 2:
        i = rng.randrange(len(events) - 1)
        events[i], events[i + 1] = events[i + 1], events[i]
    elif r < 0.6 and events:
        del events[rng.randrange(len(events))]
    elif r < 0.8:
        t = rng.choice(sorted(w.net.transitions))
        events.insert(rng.randint(0, len(events)), Event(t, {}, w.deletes(t)))
    elif events:
        i = rng.randrange(len(events))
        e = events[i]
        written = [v for v in sorted(w.writes(e.transition))]
        if written:
            v = rng.choice(written)
            ws = w.wr[e.transition][v]
            pick = rng.choice(list(ws)) if ws.size() <= 200 else ws.lo
            events[i] = Event(e.transition, {**dict(e.writes), v: pick}, e.deletes)
    return Trace(tuple(events))


def corpus(seed: int, n: int, require_goal: bool = True, **kw):
    """``n`` random nets, each with a sampled (sometimes perturbed) trace.

    With ``require_goal`` nets are redrawn until the sampled walk reaches the
    goal (at most 20 draws), so most traces have at least one repair.
    """
    rng = random.Random(seed)
    out = []
    for i in range(n):
        for _ in range(20):
            w = random_dawnet(rng, name=f"rand{i}", **kw)
            case = random_case(w, rng)
            if not require_goal or is_goal(w, case.final):
                break
        trace = trace_of(w, case, rng)
        if rng.random() < 0.2:
            trace = mutate_trace(w, trace, rng)
        out.append((w, trace))
    return out
