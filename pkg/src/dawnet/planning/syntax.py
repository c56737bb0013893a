"""Abstract syntax of K planning domains, the text printer and its parser."""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

from ..errors import KSyntaxError


@dataclass(frozen=True)
class KVar:
    """A rule variable; printed capitalized."""

    name: str


Term = Union[KVar, int, str]


@dataclass(frozen=True)
class Lit:
    """An atom, optionally under strong negation (``-p``)."""

    pred: str
    args: tuple = ()
    neg: bool = False

    def complement(self) -> "Lit":
        return Lit(self.pred, self.args, not self.neg)

    @property
    def positive(self) -> "Lit":
        return Lit(self.pred, self.args, False) if self.neg else self

    def __str__(self) -> str:
        s = ("-" if self.neg else "") + self.pred
        if self.args:
            s += "(" + ",".join(_fmt_term(a) for a in self.args) + ")"
        return s


@dataclass(frozen=True)
class Cmp:
    """Built-in comparison ``left op right`` with op ``==`` or ``!=``."""

    op: str
    left: Term
    right: Term

    def __str__(self) -> str:
        return f"{_fmt_term(self.left)} {self.op} {_fmt_term(self.right)}"


class RuleKind(str, Enum):
    CAUSATION = "causation"
    EXECUTABILITY = "executability"


@dataclass(frozen=True)
class Rule:
    """``caused head if post after pre`` or ``executable head if pre``.

    ``head`` is ``None`` for ``false``. Default-negated literals live in the
    ``*_neg`` tuples.
    """

    kind: RuleKind
    head: Optional[Lit]
    post_pos: tuple = ()
    post_neg: tuple = ()
    pre_pos: tuple = ()
    pre_neg: tuple = ()

    @property
    def is_static(self) -> bool:
        return self.kind is RuleKind.CAUSATION and not self.pre_pos and not self.pre_neg

    def __str__(self) -> str:
        return format_rule(self)


@dataclass(frozen=True)
class FluentDecl:
    name: str
    arity: int = 0
    type_pred: Optional[str] = None


@dataclass(frozen=True)
class PlanningDomain:
    background: tuple = ()
    fluents: tuple = ()
    actions: tuple = ()
    rules: tuple = ()
    initially: tuple = ()
    goal_pos: tuple = ()
    goal_neg: tuple = ()


# identifier mangling ----------------------------------------------------------

RESERVED = frozenset({
    "caused", "if", "after", "not", "true", "false", "executable", "nonexecutable",
    "inertial", "initially", "goal", "fluents", "actions", "always", "requires",
    "ord", "total", "default", "noconcurrency", "securing", "nonconcurrency",
})
_SIMPLE = re.compile(r"[a-z][a-z0-9]*\Z")
_SPECIAL = {"q": "qq", "_": "qs", ".": "qp", "-": "qm", " ": "qw"}
_UNSPECIAL = {v[1]: k for k, v in _SPECIAL.items()}


def mangle(ident: str) -> str:
    """Injective map from any string onto ``[a-z][a-z0-9]*``.

    Plain lowercase names pass through; ``q`` is the escape letter.
    """
    if _SIMPLE.match(ident) and "q" not in ident and ident not in RESERVED:
        return ident
    out = []
    for ch in ident:
        if ch in _SPECIAL:
            out.append(_SPECIAL[ch])
        elif "a" <= ch <= "z" or "0" <= ch <= "9":
            out.append(ch)
        elif "A" <= ch <= "Z":
            out.append("qu" + ch.lower())
        else:
            code = ord(ch)
            out.append(f"qx{code:04x}" if code <= 0xFFFF else f"qy{code:06x}")
    body = "".join(out)
    if not body or not body[0].isalpha() or body in RESERVED or body == ident:
        body = "qn" + body
    return body


def demangle(name: str) -> str:
    out, i = [], 0
    while i < len(name):
        ch = name[i]
        if ch != "q":
            out.append(ch)
            i += 1
            continue
        code = name[i + 1]
        if code == "n":
            i += 2
        elif code == "u":
            out.append(name[i + 2].upper())
            i += 3
        elif code == "x":
            out.append(chr(int(name[i + 2:i + 6], 16)))
            i += 6
        elif code == "y":
            out.append(chr(int(name[i + 2:i + 8], 16)))
            i += 8
        else:
            out.append(_UNSPECIAL[code])
            i += 2
    return "".join(out)


# printing ------------------------------------------------------------------------

def _fmt_term(t: Term) -> str:
    if isinstance(t, KVar):
        return t.name
    return str(t)


def _fmt_item(x: Union[Lit, Cmp]) -> str:
    return str(x)


def _body(pos: tuple, neg: tuple) -> str:
    return ", ".join([_fmt_item(x) for x in pos] + [f"not {x}" for x in neg])


def format_rule(r: Rule) -> str:
    head = "false" if r.head is None else str(r.head)
    if r.kind is RuleKind.EXECUTABILITY:
        body = _body(r.pre_pos, r.pre_neg)
        return f"executable {head}" + (f" if {body}." if body else ".")
    s = f"caused {head}"
    post = _body(r.post_pos, r.post_neg)
    pre = _body(r.pre_pos, r.pre_neg)
    if post:
        s += f" if {post}"
    elif not pre:
        s += " if true"
    if pre:
        s += f" after {pre}"
    return s + "."


def serialize_domain(pd: PlanningDomain, title: str = "") -> str:
    lines = [f"% {title} planning domain" if title else "% planning domain"]
    if pd.background:
        lines.append("% background knowledge")
        lines.extend(f"{f}." for f in pd.background)
    lines.append("")
    lines.append("fluents:")
    for f in pd.fluents:
        if f.arity:
            args = ",".join(f"X{i}" for i in range(1, f.arity + 1))
            lines.append(f"  {f.name}({args}) requires {f.type_pred}({args}).")
        else:
            lines.append(f"  {f.name}.")
    lines.append("")
    lines.append("actions:")
    lines.extend(f"  {a}." for a in pd.actions)
    lines.append("")
    lines.append("always:")
    lines.extend(f"  {format_rule(r)}" for r in pd.rules)
    return "\n".join(lines) + "\n"


def serialize_problem(pd: PlanningDomain) -> str:
    init = ", ".join(str(x) for x in pd.initially)
    goal = ", ".join([str(x) for x in pd.goal_pos] + [f"not {x}" for x in pd.goal_neg])
    return f"initially: {init}.\n\ngoal: {goal}?\n"


def serialize(pd: PlanningDomain, title: str = "") -> str:
    return serialize_domain(pd, title) + "\n" + serialize_problem(pd)


# parsing -------------------------------------------------------------------------

_TOK = re.compile(r"\s*(?:(?P<cmp>==|!=)|(?P<punct>[(),.?:])|(?P<int>-?\d+)|(?P<name>-?[A-Za-z][A-Za-z0-9_]*))")


def _tokens(text: str) -> list:
    out, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOK.match(text, pos)
        if not m or m.end() == pos:
            raise KSyntaxError(f"cannot tokenize {text[pos:pos + 20]!r}")
        out.append((m.lastgroup, m.group(m.lastgroup)))
        pos = m.end()
    return out


class _P:
    def __init__(self, text: str):
        self.t = _tokens(text)
        self.i = 0

    def peek(self):
        return self.t[self.i] if self.i < len(self.t) else ("eof", "")

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, v):
        tok = self.take()
        if tok[1] != v:
            raise KSyntaxError(f"expected {v!r}, got {tok[1]!r}")

    def term(self) -> Term:
        kind, v = self.take()
        if kind == "int":
            return int(v)
        if kind == "name" and not v.startswith("-"):
            return KVar(v) if v[0].isupper() else v
        raise KSyntaxError(f"bad term {v!r}")

    def lit(self) -> Lit:
        kind, v = self.take()
        if kind != "name":
            raise KSyntaxError(f"expected a literal, got {v!r}")
        neg = v.startswith("-")
        pred = v[1:] if neg else v
        args = []
        if self.peek()[1] == "(":
            self.take()
            args.append(self.term())
            while self.peek()[1] == ",":
                self.take()
                args.append(self.term())
            self.expect(")")
        return Lit(pred, tuple(args), neg)

    def item(self):
        """A body item: ``not lit``, a literal or a comparison."""
        kind, v = self.peek()
        if v == "not":
            self.take()
            return ("neg", self.lit())
        if kind == "int" or (kind == "name" and v[0].isupper()):
            left = self.term()
            op = self.take()
            if op[0] != "cmp":
                raise KSyntaxError(f"expected == or !=, got {op[1]!r}")
            return ("pos", Cmp(op[1], left, self.term()))
        return ("pos", self.lit())

    def body(self, stop: tuple):
        pos, neg = [], []
        if self.peek()[1] == "true":
            self.take()
            return (), ()
        while True:
            kind, x = self.item()
            (neg if kind == "neg" else pos).append(x)
            if self.peek()[1] != ",":
                break
            self.take()
        if self.peek()[1] not in stop:
            raise KSyntaxError(f"unexpected {self.peek()[1]!r}")
        return tuple(pos), tuple(neg)

    def rule(self) -> Rule:
        kw = self.take()[1]
        if kw == "executable":
            head = self.lit()
            pre = ((), ())
            if self.peek()[1] == "if":
                self.take()
                pre = self.body((".",))
            self.expect(".")
            return Rule(RuleKind.EXECUTABILITY, head, pre_pos=pre[0], pre_neg=pre[1])
        if kw != "caused":
            raise KSyntaxError(f"expected a rule, got {kw!r}")
        if self.peek()[1] == "false":
            self.take()
            head = None
        else:
            head = self.lit()
        post, pre = ((), ()), ((), ())
        if self.peek()[1] == "if":
            self.take()
            post = self.body(("after", "."))
        if self.peek()[1] == "after":
            self.take()
            pre = self.body((".",))
        self.expect(".")
        return Rule(RuleKind.CAUSATION, head, post[0], post[1], pre[0], pre[1])


def _strip_comments(text: str) -> str:
    return "\n".join(line.split("%", 1)[0] for line in text.splitlines())


def parse(text: str) -> PlanningDomain:
    """Parse text produced by :func:`serialize` back into a PlanningDomain."""
    p = _P(_strip_comments(text))
    background, fluents, actions, rules = [], [], [], []
    initially, goal_pos, goal_neg = [], [], []
    section = "background"
    while p.peek()[0] != "eof":
        kind, v = p.peek()
        if v in ("fluents", "actions", "always", "initially", "goal") and p.i + 1 < len(p.t) \
                and p.t[p.i + 1][1] == ":":
            p.take(), p.take()
            section = v
            if v == "initially":
                while True:
                    initially.append(p.lit())
                    if p.peek()[1] != ",":
                        break
                    p.take()
                p.expect(".")
            elif v == "goal":
                pos, neg = p.body(("?",))
                goal_pos, goal_neg = list(pos), list(neg)
                p.expect("?")
            continue
        if section == "background":
            background.append(p.lit())
            p.expect(".")
        elif section == "fluents":
            lit = p.lit()
            if lit.args:
                p.expect("requires")
                typ = p.lit()
                fluents.append(FluentDecl(lit.pred, len(lit.args), typ.pred))
            else:
                fluents.append(FluentDecl(lit.pred))
            p.expect(".")
        elif section == "actions":
            actions.append(p.lit().pred)
            p.expect(".")
        elif section == "always":
            rules.append(p.rule())
        else:
            raise KSyntaxError(f"unexpected {v!r} in section {section}")
    return PlanningDomain(tuple(background), tuple(fluents), tuple(actions), tuple(rules),
                          tuple(initially), tuple(goal_pos), tuple(goal_neg))
