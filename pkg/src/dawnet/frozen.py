"""Hashable immutable mappings used for markings, assignments and payloads."""

from __future__ import annotations

from collections.abc import Iterator, Mapping
from typing import Any, Union

Value = Union[int, str]


def check_value(x: Any) -> Value:
    """Accept an int or atom string; reject bools and anything else."""
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise TypeError(f"values must be int or str, got {x!r}")
    return x


def value_key(v: Value) -> tuple:
    # ints sort before atoms; never compare an int with a str directly
    return (1, v) if isinstance(v, str) else (0, v)


class FrozenMap(Mapping):
    """A string-keyed mapping with value semantics."""

    __slots__ = ("_d", "_items", "_hash")

    def __init__(self, data: Any = ()):
        d = dict(data)
        self._d = d
        self._items = tuple(sorted(d.items(), key=lambda kv: kv[0]))
        self._hash = None

    def __getitem__(self, key: str) -> Any:
        return self._d[key]

    def __iter__(self) -> Iterator[str]:
        return (k for k, _ in self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((type(self).__name__, self._items))
        return self._hash

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FrozenMap):
            return self._items == other._items
        if isinstance(other, Mapping):
            return self._d == dict(other)
        return NotImplemented

    def items_sorted(self) -> tuple:
        return self._items

    def sort_key(self) -> tuple:
        return tuple((k, value_key(v)) for k, v in self._items)

    def updated(self, changes: Mapping, removed: Any = ()) -> "FrozenMap":
        d = dict(self._d)
        for k in removed:
            d.pop(k, None)
        d.update(changes)
        return type(self)(d)

    def __repr__(self) -> str:
        body = ", ".join(f"{k!r}: {v!r}" for k, v in self._items)
        return f"{type(self).__name__}({{{body}}})"


class Assignment(FrozenMap):
    """Partial map from variable names to values."""

    __slots__ = ()

    def __init__(self, data: Any = ()):
        d = dict(data)
        for v in d.values():
            check_value(v)
        super().__init__(d)
