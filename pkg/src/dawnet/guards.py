"""Guard language: AST, parser, pretty-printer, evaluation and substitution.

Core syntax::

    phi ::= true | def(v) | t = t | t <= t | !phi | phi && phi | (phi)

``false``, ``||``, ``!=``, ``>=``, ``<`` and ``>`` are accepted as sugar and
expanded into the core connectives. Atom constants may be quoted (``"w"``) or
written bare when the name is not a declared variable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Union

from .data import DataModel
from .errors import GuardSyntaxError, UnknownVariable
from .frozen import Value, check_value


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: Value

    def __post_init__(self):
        check_value(self.value)


Term = Union[Var, Const]


class Guard:
    __slots__ = ()


@dataclass(frozen=True)
class TrueGuard(Guard):
    pass


@dataclass(frozen=True)
class Def(Guard):
    var: str


@dataclass(frozen=True)
class Eq(Guard):
    left: Term
    right: Term


@dataclass(frozen=True)
class Leq(Guard):
    left: Term
    right: Term


@dataclass(frozen=True)
class Not(Guard):
    arg: Guard


@dataclass(frozen=True)
class And(Guard):
    left: Guard
    right: Guard


TRUE = TrueGuard()
FALSE = Not(TRUE)


def conj(*parts: Guard) -> Guard:
    """Left-nested conjunction; ``true`` for no arguments."""
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(a: Guard, b: Guard) -> Guard:
    return Not(And(Not(a), Not(b)))


# evaluation ---------------------------------------------------------------

def _value(term: Term, eta: Mapping[str, Value]) -> Optional[Value]:
    if isinstance(term, Const):
        return term.value
    return eta.get(term.name)


def eval_guard(g: Guard, dm: DataModel, eta: Mapping[str, Value]) -> bool:
    """Evaluate ``g`` under the partial assignment ``eta``.

    Comparisons touching an unbound variable are false. Equality is identity
    of ground values; ``<=`` holds only inside a common ordered domain.
    """
    if isinstance(g, TrueGuard):
        return True
    if isinstance(g, Def):
        return g.var in eta
    if isinstance(g, Eq):
        a, b = _value(g.left, eta), _value(g.right, eta)
        return a is not None and b is not None and type(a) is type(b) and a == b
    if isinstance(g, Leq):
        a, b = _value(g.left, eta), _value(g.right, eta)
        return a is not None and b is not None and dm.leq(a, b)
    if isinstance(g, Not):
        return not eval_guard(g.arg, dm, eta)
    if isinstance(g, And):
        return eval_guard(g.left, dm, eta) and eval_guard(g.right, dm, eta)
    raise TypeError(f"not a guard: {g!r}")


def substitute(g: Guard, eta: Mapping[str, Value]) -> Guard:
    """Replace every bound variable occurrence by its value."""

    def term(t: Term) -> Term:
        if isinstance(t, Var) and t.name in eta:
            return Const(eta[t.name])
        return t

    if isinstance(g, TrueGuard):
        return g
    if isinstance(g, Def):
        return TRUE if g.var in eta else g
    if isinstance(g, Eq):
        return Eq(term(g.left), term(g.right))
    if isinstance(g, Leq):
        return Leq(term(g.left), term(g.right))
    if isinstance(g, Not):
        return Not(substitute(g.arg, eta))
    if isinstance(g, And):
        return And(substitute(g.left, eta), substitute(g.right, eta))
    raise TypeError(f"not a guard: {g!r}")


def subformulas(g: Guard) -> Iterator[Guard]:
    """Pre-order traversal."""
    yield g
    if isinstance(g, Not):
        yield from subformulas(g.arg)
    elif isinstance(g, And):
        yield from subformulas(g.left)
        yield from subformulas(g.right)


def variables(g: Guard) -> frozenset:
    out = set()
    for s in subformulas(g):
        if isinstance(s, Def):
            out.add(s.var)
        elif isinstance(s, (Eq, Leq)):
            out.update(t.name for t in (s.left, s.right) if isinstance(t, Var))
    return frozenset(out)


def comparisons(g: Guard) -> Iterator[Union[Eq, Leq]]:
    for s in subformulas(g):
        if isinstance(s, (Eq, Leq)):
            yield s


def constants(g: Guard) -> frozenset:
    return frozenset(
        t.value for s in comparisons(g) for t in (s.left, s.right) if isinstance(t, Const)
    )


# printing -----------------------------------------------------------------

def _fmt_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t.value, int):
        return str(t.value)
    return '"' + t.value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def pretty(g: Guard) -> str:
    """Render ``g`` so that ``parse_guard(pretty(g)) == g``."""
    if isinstance(g, TrueGuard):
        return "true"
    if isinstance(g, Def):
        return f"def({g.var})"
    if isinstance(g, Eq):
        return f"{_fmt_term(g.left)} = {_fmt_term(g.right)}"
    if isinstance(g, Leq):
        return f"{_fmt_term(g.left)} <= {_fmt_term(g.right)}"
    if isinstance(g, Not):
        inner = pretty(g.arg)
        if isinstance(g.arg, (TrueGuard, Def, Not)):
            return "!" + inner
        return f"!({inner})"
    if isinstance(g, And):
        right = pretty(g.right)
        if isinstance(g.right, And):
            right = f"({right})"
        return f"{pretty(g.left)} && {right}"
    raise TypeError(f"not a guard: {g!r}")


# parsing ------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<op>&&|\|\||<=|>=|==|!=|=|<|>|!|\(|\))
  | (?P<int>-?\d+)
  | (?P<str>"(?:[^"\\]|\\.)*"|'(?:[^'\\]|\\.)*')
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list:
    toks, pos = [], 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise GuardSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            toks.append((kind, m.group(), pos))
        pos = m.end()
    toks.append(("eof", "", len(text)))
    return toks


def _unquote(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s[1:-1])


class _Parser:
    def __init__(self, text: str, dm: Optional[DataModel]):
        self.toks = _tokenize(text)
        self.i = 0
        self.dm = dm

    def peek(self) -> tuple:
        return self.toks[self.i]

    def take(self) -> tuple:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value: str) -> tuple:
        tok = self.take()
        if tok[1] != value or tok[0] == "str":
            raise GuardSyntaxError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2])
        return tok

    def parse(self) -> Guard:
        g = self.disjunction()
        tok = self.peek()
        if tok[0] != "eof":
            raise GuardSyntaxError(f"unexpected {tok[1]!r}", tok[2])
        return g

    def disjunction(self) -> Guard:
        g = self.conjunction()
        while self.peek()[1] == "||" and self.peek()[0] == "op":
            self.take()
            g = disj(g, self.conjunction())
        return g

    def conjunction(self) -> Guard:
        g = self.unary()
        while self.peek()[1] == "&&" and self.peek()[0] == "op":
            self.take()
            g = And(g, self.unary())
        return g

    def unary(self) -> Guard:
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "!":
            self.take()
            return Not(self.unary())
        return self.primary()

    def primary(self) -> Guard:
        kind, text, pos = self.peek()
        if kind == "op" and text == "(":
            self.take()
            g = self.disjunction()
            self.expect(")")
            return g
        if kind == "ident" and text in ("true", "false"):
            self.take()
            return TRUE if text == "true" else FALSE
        if kind == "ident" and text == "def":
            self.take()
            self.expect("(")
            k2, name, p2 = self.take()
            if k2 != "ident":
                raise GuardSyntaxError("expected a variable name", p2)
            self.var(name, p2)
            self.expect(")")
            return Def(name)
        left = self.term()
        kind, op, pos = self.take()
        if kind != "op" or op not in ("=", "==", "!=", "<=", ">=", "<", ">"):
            raise GuardSyntaxError(f"expected a comparison operator, found {op or 'end of input'!r}", pos)
        right = self.term()
        if op in ("=", "=="):
            return Eq(left, right)
        if op == "!=":
            return Not(Eq(left, right))
        if op == "<=":
            return Leq(left, right)
        if op == ">=":
            return Leq(right, left)
        if op == "<":
            return And(Leq(left, right), Not(Leq(right, left)))
        return And(Leq(right, left), Not(Leq(left, right)))

    def var(self, name: str, pos: int) -> Var:
        if self.dm is not None and name not in self.dm.dm:
            raise UnknownVariable(f"undeclared variable {name!r} at position {pos}")
        return Var(name)

    def term(self) -> Term:
        kind, text, pos = self.take()
        if kind == "int":
            return Const(int(text))
        if kind == "str":
            return Const(_unquote(text))
        if kind == "ident" and text not in ("true", "false", "def"):
            if self.dm is None or text in self.dm.dm:
                return Var(text)
            if text in self.dm.atoms():
                return Const(text)
            return self.var(text, pos)
        raise GuardSyntaxError(f"expected a variable or constant, found {text or 'end of input'!r}", pos)


def parse_guard(text: str, dm: Optional[DataModel] = None) -> Guard:
    """Parse guard text. With ``dm`` given, identifiers are resolved and checked."""
    return _Parser(text, dm).parse()
