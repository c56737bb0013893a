"""Translate a DAW-net into a K planning domain."""

from __future__ import annotations

from itertools import permutations
from typing import Union

from ..errors import IntervalNotExpanded
from ..frozen import Value, value_key
from ..guards import And, Const, Def, Eq, Guard, Leq, Not, Term, TrueGuard, Var
from ..model import DawNet, Delete, ExplicitSet, IntInterval
from .syntax import Cmp, FluentDecl, KVar, Lit, PlanningDomain, Rule, RuleKind, mangle

C = RuleKind.CAUSATION
X, Y, V, T1, T2 = KVar("X"), KVar("Y"), KVar("V"), KVar("T1"), KVar("T2")


def place_fluent(p: str) -> str:
    return mangle(p)


def action_name(t: str) -> str:
    return mangle(t)


def var_fluent(v: str) -> str:
    return "var_" + mangle(v)


def def_fluent(v: str) -> str:
    return "var_def_" + mangle(v)


def change_fluent(v: str) -> str:
    return "var_change_" + mangle(v)


def vardom_pred(v: str, t: str = None) -> str:
    return "vardom_" + mangle(v) + ("" if t is None else "_" + mangle(t))


def const(value: Value) -> Union[int, str]:
    return value if isinstance(value, int) else mangle(value)


# guards ---------------------------------------------------------------------

def flatten(g: Guard) -> tuple:
    """Structural key of a guard with nested conjunctions merged into n-ary nodes."""
    if isinstance(g, TrueGuard):
        return ("true",)
    if isinstance(g, Def):
        return ("def", g.var)
    if isinstance(g, Eq):
        return ("eq", g.left, g.right)
    if isinstance(g, Leq):
        return ("leq", g.left, g.right)
    if isinstance(g, Not):
        return ("not", flatten(g.arg))
    if isinstance(g, And):
        parts = []
        for side in (g.left, g.right):
            f = flatten(side)
            parts.extend(f[1] if f[0] == "and" else [f])
        return ("and", tuple(parts))
    raise TypeError(g)


def unflatten(f: tuple) -> Guard:
    kind = f[0]
    if kind == "true":
        return TrueGuard()
    if kind == "def":
        return Def(f[1])
    if kind == "eq":
        return Eq(f[1], f[2])
    if kind == "leq":
        return Leq(f[1], f[2])
    if kind == "not":
        return Not(unflatten(f[1]))
    parts = [unflatten(x) for x in f[1]]
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def _children(f: tuple) -> tuple:
    if f[0] == "not":
        return (f[1],)
    if f[0] == "and":
        return f[1]
    return ()


def guard_numbering(w: DawNet) -> dict:
    """Flattened subformula -> fluent name, numbered in pre-order over sorted transitions."""
    names: dict = {}

    def visit(f: tuple):
        if f not in names:
            names[f] = f"guard_{len(names) + 1}"
        for c in _children(f):
            visit(c)

    for t in sorted(w.net.transitions):
        visit(flatten(w.gd[t]))
    return names


def guard_table(w: DawNet) -> dict:
    """Guard fluent name -> guard formula it stands for."""
    return {name: unflatten(f) for f, name in guard_numbering(w).items()}


def _xi(term: Term, var: KVar) -> tuple:
    if isinstance(term, Var):
        return (Lit(var_fluent(term.name), (var,)),)
    return (Cmp("==", var, const(term.value)),)


def _guard_rule(f: tuple, names: dict) -> Rule:
    head = Lit(names[f])
    kind = f[0]
    if kind == "true":
        return Rule(C, head)
    if kind == "def":
        return Rule(C, head, post_pos=(Lit(def_fluent(f[1])),))
    if kind == "eq":
        return Rule(C, head, post_pos=_xi(f[1], T1) + _xi(f[2], T2) + (Cmp("==", T1, T2),))
    if kind == "leq":
        return Rule(C, head, post_pos=_xi(f[1], T1) + _xi(f[2], T2) + (Lit("ord", (T1, T2)),))
    if kind == "not":
        return Rule(C, head, post_neg=(Lit(names[f[1]]),))
    return Rule(C, head, post_pos=tuple(Lit(names[c]) for c in f[1]))


def _lit_key(l: Lit) -> tuple:
    return (l.pred, tuple(value_key(a) for a in l.args))


# encoding -------------------------------------------------------------------

def encode(w: DawNet) -> PlanningDomain:
    """Emit the K domain whose trajectories mirror the cases of ``w``.

    Interval writes must be expanded to explicit sets first
    (see :func:`dawnet.model.expand_intervals`).
    """
    for t, spec in w.wr.items():
        for v, ws in spec.items():
            if isinstance(ws, IntInterval):
                raise IntervalNotExpanded(f"wr({t})({v}) is an interval; expand it before encoding")

    net = w.net
    places = sorted(net.places)
    transitions = sorted(net.transitions)
    variables = sorted(w.data.dm)
    names = guard_numbering(w)

    background = set()
    universe: dict = {v: set() for v in variables}
    for t in transitions:
        for v, ws in w.wr[t].items():
            if isinstance(ws, ExplicitSet):
                for d in ws:
                    background.add(Lit(vardom_pred(v, t), (const(d),)))
                    universe[v].add(d)
    for v in variables:
        for d in universe[v]:
            background.add(Lit(vardom_pred(v), (const(d),)))
    relevant = set().union(*universe.values()) if universe else set()
    for f in names:
        if f[0] in ("eq", "leq"):
            relevant.update(x.value for x in f[1:] if isinstance(x, Const))
    for a in relevant:
        for b in relevant:
            if w.data.leq(a, b):
                background.add(Lit("ord", (const(a), const(b))))

    fluents = [FluentDecl(place_fluent(p)) for p in places]
    for v in variables:
        fluents += [FluentDecl(var_fluent(v), 1, vardom_pred(v)),
                    FluentDecl(def_fluent(v)), FluentDecl(change_fluent(v))]
    fluents += [FluentDecl(n) for n in sorted(names.values(), key=lambda s: int(s.split("_")[1]))]

    rules: list = []
    for t in transitions:
        pre = tuple(Lit(place_fluent(p)) for p in sorted(net.preset(t)))
        rules.append(Rule(RuleKind.EXECUTABILITY, Lit(action_name(t)), pre_pos=pre))
    for t1, t2 in permutations(transitions, 2):
        rules.append(Rule(C, None, pre_pos=(Lit(action_name(t1)), Lit(action_name(t2)))))
    for t in transitions:
        a = (Lit(action_name(t)),)
        pre, post = net.preset(t), net.postset(t)
        for p in sorted(pre - post):
            rules.append(Rule(C, Lit(place_fluent(p), neg=True), pre_pos=a))
        for p in sorted(post):
            rules.append(Rule(C, Lit(place_fluent(p)), pre_pos=a))
    for p in places:
        lit = Lit(place_fluent(p))
        rules.append(Rule(C, lit, post_neg=(lit.complement(),), pre_pos=(lit,)))
    for v in variables:
        vf = var_fluent(v)
        rules.append(Rule(C, None, post_pos=(Lit(vf, (X,)), Lit(vf, (Y,)), Cmp("!=", X, Y))))
        rules.append(Rule(C, Lit(vf, (X,)), post_neg=(Lit(vf, (X,), True), Lit(change_fluent(v))),
                          pre_pos=(Lit(vf, (X,)),)))
        rules.append(Rule(C, Lit(def_fluent(v)), post_pos=(Lit(vf, (X,)),)))
    for t in transitions:
        a = (Lit(action_name(t)),)
        for v in sorted(w.wr[t]):
            ws = w.wr[t][v]
            vf, change = var_fluent(v), Lit(change_fluent(v))
            if isinstance(ws, Delete):
                rules.append(Rule(C, None, post_pos=(Lit(def_fluent(v)),), pre_pos=a))
            elif ws.size() == 1:
                (d,) = list(ws)
                rules.append(Rule(C, Lit(vf, (const(d),)), pre_pos=a))
            else:
                dom = Lit(vardom_pred(v, t), (V,))
                rules.append(Rule(C, Lit(vf, (V,)), post_pos=(dom,), post_neg=(Lit(vf, (V,), True),), pre_pos=a))
                rules.append(Rule(C, Lit(vf, (V,), True), post_pos=(dom,), post_neg=(Lit(vf, (V,)),), pre_pos=a))
                rules.append(Rule(C, None, post_neg=(Lit(def_fluent(v)),), pre_pos=a))
            rules.append(Rule(C, change, pre_pos=a))
    for t in transitions:
        g = Lit(names[flatten(w.gd[t])])
        rules.append(Rule(C, None, pre_pos=(Lit(action_name(t)),), pre_neg=(g,)))
    for f, _ in sorted(names.items(), key=lambda kv: int(kv[1].split("_")[1])):
        rules.append(_guard_rule(f, names))

    others = tuple(Lit(place_fluent(p)) for p in places if p != w.meta.end)
    return PlanningDomain(
        background=tuple(sorted(background, key=_lit_key)),
        fluents=tuple(fluents),
        actions=tuple(action_name(t) for t in transitions),
        rules=tuple(rules),
        initially=(Lit(place_fluent(w.meta.start)),),
        goal_pos=(Lit(place_fluent(w.meta.end)),),
        goal_neg=others,
    )
