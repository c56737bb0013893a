"""Value domains and the data model (variables, domains, orders)."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Mapping, Optional, Union

from .errors import NetError, UnknownVariable
from .frozen import Value, check_value, value_key

NATURAL = "natural"
IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
RESERVED = frozenset({"true", "false", "def"})


@dataclass(frozen=True)
class Domain:
    """A finite value domain: an explicit set or an integer interval.

    ``order`` is ``None`` (unordered), ``"natural"`` (integer order) or an
    explicit set of ``(a, b)`` pairs meaning ``a <= b``. Explicit orders are
    closed reflexively and must be antisymmetric and transitive.
    """

    name: str
    values: Optional[frozenset] = None
    lo: Optional[int] = None
    hi: Optional[int] = None
    order: Union[None, str, frozenset] = None

    def __post_init__(self):
        if self.values is not None:
            if self.lo is not None or self.hi is not None:
                raise NetError(f"domain {self.name!r}: give either values or lo/hi, not both")
            vals = frozenset(check_value(v) for v in self.values)
            object.__setattr__(self, "values", vals)
        else:
            if self.lo is None or self.hi is None:
                raise NetError(f"domain {self.name!r}: needs values or both lo and hi")
            check_value(self.lo), check_value(self.hi)
            if not isinstance(self.lo, int) or not isinstance(self.hi, int) or self.lo > self.hi:
                raise NetError(f"domain {self.name!r}: bad interval [{self.lo}, {self.hi}]")
        if self.order is None:
            return
        if self.order == NATURAL:
            if self.values is not None and not all(isinstance(v, int) for v in self.values):
                raise NetError(f"domain {self.name!r}: natural order needs integer values")
            return
        if self.values is None:
            raise NetError(f"domain {self.name!r}: intervals only support the natural order")
        pairs = {(check_value(a), check_value(b)) for a, b in self.order}
        for a, b in pairs:
            if a not in self.values or b not in self.values:
                raise NetError(f"domain {self.name!r}: order pair ({a!r}, {b!r}) outside the domain")
        pairs |= {(v, v) for v in self.values}
        for a, b in pairs:
            if a != b and (b, a) in pairs:
                raise NetError(f"domain {self.name!r}: order is not antisymmetric on {a!r}, {b!r}")
        for (a, b), (c, d) in product(pairs, pairs):
            if b == c and (a, d) not in pairs:
                raise NetError(f"domain {self.name!r}: order is not transitive ({a!r} <= {b!r} <= {d!r})")
        object.__setattr__(self, "order", frozenset(pairs))

    @property
    def is_interval(self) -> bool:
        return self.values is None

    @property
    def ordered(self) -> bool:
        return self.order is not None

    def __contains__(self, v: object) -> bool:
        if isinstance(v, bool):
            return False
        if self.values is not None:
            return v in self.values and type(v) in (int, str)
        return isinstance(v, int) and self.lo <= v <= self.hi

    def size(self) -> int:
        return len(self.values) if self.values is not None else self.hi - self.lo + 1

    def __iter__(self) -> Iterator[Value]:
        if self.values is not None:
            return iter(sorted(self.values, key=value_key))
        return iter(range(self.lo, self.hi + 1))

    def leq(self, a: Value, b: Value) -> bool:
        """Order test for two members; False when the domain is unordered."""
        if self.order is None:
            return False
        if self.order == NATURAL:
            return isinstance(a, int) and isinstance(b, int) and a <= b
        return (a, b) in self.order


@dataclass(frozen=True)
class DataModel:
    """Variables with their domains (the ``dm`` map) and the domains themselves."""

    domains: Mapping[str, Domain] = field(default_factory=dict)
    dm: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "domains", dict(self.domains))
        object.__setattr__(self, "dm", dict(self.dm))
        for name, dom in self.domains.items():
            if dom.name != name:
                raise NetError(f"domain registered as {name!r} is named {dom.name!r}")
        for var, dname in self.dm.items():
            if not IDENT_RE.match(var) or var in RESERVED:
                raise NetError(f"variable name {var!r} is not a plain identifier")
            if dname not in self.domains:
                raise NetError(f"variable {var!r} uses undeclared domain {dname!r}")
        object.__setattr__(self, "_ordered", tuple(d for d in self.domains.values() if d.ordered))

    @property
    def variables(self) -> frozenset:
        return frozenset(self.dm)

    def domain_of(self, var: str) -> Domain:
        try:
            return self.domains[self.dm[var]]
        except KeyError:
            raise UnknownVariable(var) from None

    def leq(self, a: Value, b: Value) -> bool:
        """True iff some ordered domain holds both values and relates them."""
        return any(a in d and b in d and d.leq(a, b) for d in self._ordered)

    def atoms(self) -> frozenset:
        out = set()
        for d in self.domains.values():
            if d.values is not None:
                out.update(v for v in d.values if isinstance(v, str))
        return frozenset(out)

    def is_ordered_var(self, var: str) -> bool:
        return self.domain_of(var).ordered

    def check(self, var: str, value: Value) -> bool:
        return value in self.domain_of(var)


def sorted_values(values: Iterable[Value]) -> list:
    return sorted(values, key=value_key)
