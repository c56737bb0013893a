"""Place/transition nets, workflow-net metadata, markings and k-safeness."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Mapping, Optional

from .errors import NetError, NotEnabled, NotFound, UnknownTransition
from .frozen import FrozenMap


class Observability(str, Enum):
    ALWAYS = "always"
    SOMETIMES = "sometimes"
    NEVER = "never"


class Marking(FrozenMap):
    """Sparse multiset of places. Missing places hold zero tokens."""

    __slots__ = ()

    def __init__(self, data: Any = ()):
        d = {}
        for p, n in dict(data).items():
            if isinstance(n, bool) or not isinstance(n, int) or n < 0:
                raise ValueError(f"token count for {p!r} must be a non-negative int")
            if n:
                d[p] = n
        super().__init__(d)

    def __getitem__(self, place: str) -> int:
        return self._d.get(place, 0)

    def __contains__(self, place: object) -> bool:
        return place in self._d

    def total(self, places: Optional[Iterable[str]] = None) -> int:
        if places is None:
            return sum(self._d.values())
        return sum(self._d.get(p, 0) for p in places)

    def max_tokens(self) -> int:
        return max(self._d.values(), default=0)


@dataclass(frozen=True)
class PetriNet:
    """A bipartite directed graph of places and transitions.

    Node identifiers are opaque strings and must be unique across both kinds.
    """

    places: frozenset
    transitions: frozenset
    arcs: frozenset

    def __post_init__(self):
        object.__setattr__(self, "places", frozenset(self.places))
        object.__setattr__(self, "transitions", frozenset(self.transitions))
        object.__setattr__(self, "arcs", frozenset(tuple(a) for a in self.arcs))
        clash = self.places & self.transitions
        if clash:
            raise NetError(f"identifiers used as both place and transition: {sorted(clash)}")
        pre: dict[str, set] = {n: set() for n in self.places | self.transitions}
        post: dict[str, set] = {n: set() for n in self.places | self.transitions}
        for src, dst in self.arcs:
            if src not in pre or dst not in pre:
                raise NetError(f"arc ({src!r}, {dst!r}) references an unknown node")
            if (src in self.places) == (dst in self.places):
                raise NetError(f"arc ({src!r}, {dst!r}) is not place-transition bipartite")
            post[src].add(dst)
            pre[dst].add(src)
        object.__setattr__(self, "_pre", {n: frozenset(s) for n, s in pre.items()})
        object.__setattr__(self, "_post", {n: frozenset(s) for n, s in post.items()})

    def preset(self, node: str) -> frozenset:
        try:
            return self._pre[node]
        except KeyError:
            raise NotFound(node) from None

    def postset(self, node: str) -> frozenset:
        try:
            return self._post[node]
        except KeyError:
            raise NotFound(node) from None


def preset(net: PetriNet, node: str) -> frozenset:
    return net.preset(node)


def postset(net: PetriNet, node: str) -> frozenset:
    return net.postset(node)


@dataclass(frozen=True)
class WfNetMeta:
    """Workflow-net designation: source/sink places and per-transition observability.

    ``start_t``/``end_t`` are set once the net has been normalized.
    """

    start: str
    end: str
    observability: Mapping[str, Observability] = field(default_factory=dict)
    start_t: Optional[str] = None
    end_t: Optional[str] = None

    def observability_of(self, t: str) -> Observability:
        return self.observability.get(t, Observability.SOMETIMES)


def is_enabled(net: PetriNet, m: Marking, t: str) -> bool:
    return all(m[p] >= 1 for p in net.preset(t))


def fire(net: PetriNet, m: Marking, t: str) -> Marking:
    """Consume one token per input place and produce one per output place."""
    if t not in net.transitions:
        raise UnknownTransition(t)
    pre, post = net.preset(t), net.postset(t)
    if not all(m[p] >= 1 for p in pre):
        raise NotEnabled(f"{t} is not enabled")
    d = dict(m)
    for p in pre - post:
        d[p] = d[p] - 1
    for p in post - pre:
        d[p] = d.get(p, 0) + 1
    return Marking(d)


def initial_marking(meta: WfNetMeta) -> Marking:
    return Marking({meta.start: 1})


@dataclass(frozen=True)
class Violation:
    kind: str
    node: Optional[str]
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations

    def by_node(self) -> dict:
        out: dict = {}
        for v in self.violations:
            out.setdefault(v.node, []).append(v.kind)
        return out

    def __str__(self) -> str:
        if self.ok:
            return "WF-net: ok"
        return "\n".join(f"{v.kind}: {v.message}" for v in self.violations)


def _closure(start: str, step) -> set:
    seen = {start}
    queue = deque([start])
    while queue:
        n = queue.popleft()
        for m in step(n):
            if m not in seen:
                seen.add(m)
                queue.append(m)
    return seen


def validate_wfnet(net: PetriNet, meta: WfNetMeta) -> ValidationReport:
    """Report every way in which ``net`` fails to be a workflow net."""
    out: list[Violation] = []
    for role, p in (("start", meta.start), ("end", meta.end)):
        if p not in net.places:
            out.append(Violation("missing_place", p, f"{role} place {p!r} is not a place of the net"))
    if out:
        return ValidationReport(tuple(out))

    if net.preset(meta.start):
        out.append(Violation("start_has_input", meta.start, f"start place {meta.start!r} has incoming arcs"))
    if net.postset(meta.end):
        out.append(Violation("end_has_output", meta.end, f"end place {meta.end!r} has outgoing arcs"))

    sources = sorted(p for p in net.places if not net.preset(p))
    sinks = sorted(p for p in net.places if not net.postset(p))
    for p in sources:
        if p != meta.start:
            out.append(Violation("multiple_sources", p, f"place {p!r} has no incoming arcs"))
    for p in sinks:
        if p != meta.end:
            out.append(Violation("multiple_sinks", p, f"place {p!r} has no outgoing arcs"))

    forward = _closure(meta.start, net.postset)
    backward = _closure(meta.end, net.preset)
    for n in sorted(net.places | net.transitions):
        if n not in forward:
            out.append(Violation("unreachable", n, f"{n!r} is not on a start-end path (unreachable from start)"))
        if n not in backward:
            out.append(Violation("not_coreachable", n, f"{n!r} is not on a start-end path (cannot reach end)"))
    return ValidationReport(tuple(out))


class SafenessStatus(str, Enum):
    SAFE = "safe"
    UNSAFE = "unsafe"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SafenessVerdict:
    status: SafenessStatus
    k: int
    witness: tuple = ()
    witness_marking: Optional[Marking] = None
    explored: int = 0

    def __str__(self) -> str:
        if self.status is SafenessStatus.SAFE:
            return f"Safe({self.k}) after {self.explored} markings"
        if self.status is SafenessStatus.UNSAFE:
            return f"Unsafe: {' '.join(self.witness) or '<initial>'} reaches {dict(self.witness_marking)}"
        return f"Inconclusive after {self.explored} markings"


def check_k_safe(
    net: PetriNet,
    meta: WfNetMeta,
    k: int = 1,
    bound: int = 10**6,
    initial: Optional[Marking] = None,
) -> SafenessVerdict:
    """Breadth-first control-flow exploration looking for a place with more than k tokens."""
    m0 = initial if initial is not None else initial_marking(meta)
    transitions = sorted(net.transitions)
    parent: dict = {m0: None}
    queue = deque([m0])

    def path(m: Marking) -> tuple:
        seq = []
        while parent[m] is not None:
            m, t = parent[m]
            seq.append(t)
        return tuple(reversed(seq))

    if m0.max_tokens() > k:
        return SafenessVerdict(SafenessStatus.UNSAFE, k, (), m0, 1)
    while queue:
        m = queue.popleft()
        for t in transitions:
            if not is_enabled(net, m, t):
                continue
            m2 = fire(net, m, t)
            if m2 in parent:
                continue
            parent[m2] = (m, t)
            if m2.max_tokens() > k:
                return SafenessVerdict(SafenessStatus.UNSAFE, k, path(m2), m2, len(parent))
            if len(parent) >= bound:
                return SafenessVerdict(SafenessStatus.INCONCLUSIVE, k, explored=len(parent))
            queue.append(m2)
    return SafenessVerdict(SafenessStatus.SAFE, k, explored=len(parent))
