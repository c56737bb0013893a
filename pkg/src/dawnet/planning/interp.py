"""Reference interpreter for the K fragment emitted by the encoder.

Legality follows the reduct-based definition directly: a transition
``<s, A, s'>`` is legal when ``A`` is executable in ``s`` and ``s'`` is the
least model of the reduct w.r.t. ``s`` and ``A``. Successor generation is
specialised to the emitted fragment (a choice over even negative cycles,
then stratified closure) and every candidate is re-checked against the
generic definition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Optional, Union

from ..errors import ContradictionInInit, InconsistentState, NotStratified, UnboundedVariable
from ..frozen import Assignment
from ..guards import eval_guard
from ..model import DEFAULT_CAP, DawNet, NetState, ValueMode, expand_intervals
from ..net import Marking
from .encoder import action_name, encode, guard_table, place_fluent, var_fluent
from .syntax import Cmp, KVar, Lit, PlanningDomain, Rule, RuleKind, demangle


@dataclass(frozen=True)
class GRule:
    """A ground rule over fluent and action literals only."""

    head: Optional[Lit]
    post_pos: frozenset = frozenset()
    post_neg: frozenset = frozenset()
    pre_pos: frozenset = frozenset()
    pre_neg: frozenset = frozenset()

    @property
    def is_static(self) -> bool:
        return not self.pre_pos and not self.pre_neg


@dataclass(frozen=True)
class GroundProgram:
    actions: tuple
    causation: tuple
    executability: tuple
    initially: tuple
    goal_pos: frozenset
    goal_neg: frozenset

    @property
    def static(self) -> tuple:
        return tuple(r for r in self.causation if r.is_static)


@dataclass(frozen=True)
class StateTransition:
    frm: frozenset
    actions: frozenset
    to: frozenset


# grounding -----------------------------------------------------------------------

def _subst(x, env: dict):
    if isinstance(x, KVar):
        return env[x.name]
    return x


def _ground_lit(l: Lit, env: dict) -> Lit:
    return Lit(l.pred, tuple(_subst(a, env) for a in l.args), l.neg)


def _same(a, b) -> bool:
    return type(a) is type(b) and a == b


def ground(pd: PlanningDomain) -> GroundProgram:
    """Instantiate every rule over the background facts and fluent types."""
    facts: dict = {}
    for f in pd.background:
        facts.setdefault(f.pred, set()).add(f.args)
    fluent_types = {d.name: d for d in pd.fluents}
    actions = set(pd.actions)

    def is_background(l: Lit) -> bool:
        return l.pred not in fluent_types and l.pred not in actions

    def vars_of(x) -> set:
        args = x.args if isinstance(x, Lit) else (x.left, x.right)
        return {a.name for a in args if isinstance(a, KVar)}

    def domain_tuples(l: Lit) -> Iterable[tuple]:
        if is_background(l):
            return facts.get(l.pred, ())
        decl = fluent_types[l.pred]
        return facts.get(decl.type_pred, ()) if decl.arity else [()]

    out_c, out_e = [], []
    for r in pd.rules:
        body = [("post_pos", x) for x in r.post_pos] + [("post_neg", x) for x in r.post_neg] \
            + [("pre_pos", x) for x in r.pre_pos] + [("pre_neg", x) for x in r.pre_neg]
        all_vars = set()
        for _, x in body:
            all_vars |= vars_of(x)
        if r.head is not None:
            all_vars |= vars_of(r.head)
        generators = [x for part, x in body if part in ("post_pos", "pre_pos") and isinstance(x, Lit)]
        generators.sort(key=lambda l: 0 if is_background(l) else 1)
        equalities = [x for part, x in body if isinstance(x, Cmp) and x.op == "=="]

        def bind(env: dict) -> Iterator[dict]:
            unbound = all_vars - env.keys()
            if not unbound:
                yield env
                return
            for c in equalities:
                l, rr = c.left, c.right
                for a, b in ((l, rr), (rr, l)):
                    if isinstance(a, KVar) and a.name not in env and (not isinstance(b, KVar) or b.name in env):
                        yield from bind({**env, a.name: _subst(b, env)})
                        return
            for g in generators:
                if not (vars_of(g) & unbound):
                    continue
                for tup in domain_tuples(g):
                    if len(tup) != len(g.args):
                        continue
                    env2 = dict(env)
                    ok = True
                    for a, val in zip(g.args, tup):
                        if isinstance(a, KVar):
                            if a.name in env2 and not _same(env2[a.name], val):
                                ok = False
                                break
                            env2[a.name] = val
                        elif not _same(a, val):
                            ok = False
                            break
                    if ok:
                        yield from bind(env2)
                return
            raise UnboundedVariable(f"cannot bind {sorted(unbound)} in rule: {r}")

        for env in bind({}):
            parts: dict = {"post_pos": set(), "post_neg": set(), "pre_pos": set(), "pre_neg": set()}
            keep = True
            for part, x in body:
                if isinstance(x, Cmp):
                    a, b = _subst(x.left, env), _subst(x.right, env)
                    holds = _same(a, b) if x.op == "==" else not _same(a, b)
                    if holds != part.endswith("pos"):
                        keep = False
                        break
                    continue
                gl = _ground_lit(x, env)
                if is_background(gl):
                    holds = not gl.neg and gl.args in facts.get(gl.pred, ())
                    if holds != part.endswith("pos"):
                        keep = False
                        break
                    continue
                parts[part].add(gl)
            if not keep:
                continue
            head = None if r.head is None else _ground_lit(r.head, env)
            g = GRule(head, frozenset(parts["post_pos"]), frozenset(parts["post_neg"]),
                      frozenset(parts["pre_pos"]), frozenset(parts["pre_neg"]))
            (out_e if r.kind is RuleKind.EXECUTABILITY else out_c).append(g)

    return GroundProgram(
        actions=tuple(pd.actions),
        causation=tuple(dict.fromkeys(out_c)),
        executability=tuple(dict.fromkeys(out_e)),
        initially=tuple(pd.initially),
        goal_pos=frozenset(pd.goal_pos),
        goal_neg=frozenset(pd.goal_neg),
    )


# semantics ------------------------------------------------------------------------

def consistent(s: Iterable[Lit]) -> bool:
    s = set(s)
    return not any(l.complement() in s for l in s if not l.neg)


def executable(gp: GroundProgram, s: frozenset, a: str) -> bool:
    head = Lit(a)
    return any(e.head == head and e.pre_pos <= s and not (e.pre_neg & s) for e in gp.executability)


def _pre_holds(r: GRule, s: frozenset, acts: frozenset) -> bool:
    ctx = s | acts
    return r.pre_pos <= ctx and not (r.pre_neg & ctx)


def reduct(gp: GroundProgram, st: StateTransition) -> list:
    """Positive causation rules left after evaluating default negation against ``st``."""
    ctx = st.frm | st.actions
    out = []
    for r in gp.causation:
        if r.post_neg & st.to or r.pre_neg & ctx:
            continue
        out.append(GRule(r.head, r.post_pos, frozenset(), r.pre_pos, frozenset()))
    return out


def least_model(rules: Iterable[GRule], ctx: frozenset) -> tuple:
    """Least set closed under positive ``rules`` whose 'after' parts hold in ``ctx``.

    Returns ``(model, violated)`` where ``violated`` says a ``false`` head fired.
    """
    pending: dict = {}
    watch: dict = {}
    ready = []
    for i, r in enumerate(rules):
        if not r.pre_pos <= ctx:
            continue
        need = len(r.post_pos)
        pending[i] = (r, need)
        if need == 0:
            ready.append(r)
        for l in r.post_pos:
            watch.setdefault(l, []).append(i)
    model: set = set()
    violated = False
    counts = {i: n for i, (_, n) in pending.items()}
    while ready:
        r = ready.pop()
        if r.head is None:
            violated = True
            continue
        if r.head in model:
            continue
        model.add(r.head)
        for i in watch.get(r.head, ()):
            counts[i] -= 1
            if counts[i] == 0:
                ready.append(pending[i][0])
    return frozenset(model), violated


def is_legal_transition(gp: GroundProgram, st: StateTransition) -> bool:
    if not st.actions:
        return False
    if not all(executable(gp, st.frm, a.pred) for a in st.actions):
        return False
    if not consistent(st.to):
        return False
    model, violated = least_model(reduct(gp, st), st.frm | st.actions)
    return not violated and model == st.to


def _stratified_closure(rules: list, fixed_true: set, fixed_false: set) -> frozenset:
    """Model of a stratified positive/negative program with some literals fixed."""
    rules = [r for r in rules if r.head is not None and r.head not in fixed_true and r.head not in fixed_false]
    strata: dict = {}
    for _ in range(len(rules) + 2):
        changed = False
        for r in rules:
            lvl = strata.get(r.head, 0)
            need = max([strata.get(p, 0) for p in r.post_pos] + [strata.get(n, 0) + 1 for n in r.post_neg] + [0])
            if need > lvl:
                strata[r.head] = need
                changed = True
                if need > len(rules) + 1:
                    raise NotStratified("negative cycle outside the choice fragment")
        if not changed:
            break
    else:
        raise NotStratified("negative cycle outside the choice fragment")
    truth = set(fixed_true)
    by_level: dict = {}
    for r in rules:
        by_level.setdefault(strata.get(r.head, 0), []).append(r)
    for lvl in sorted(by_level):
        layer = [r for r in by_level[lvl] if not (r.post_neg & truth)]
        changed = True
        while changed:
            changed = False
            for r in layer:
                if r.head not in truth and r.post_pos <= truth:
                    truth.add(r.head)
                    changed = True
    return frozenset(truth)


def _choice_atoms(rules: list) -> list:
    heads = {r.head for r in rules if r.head is not None and r.head.complement() in r.post_neg}
    return sorted({h.positive for h in heads if h.complement() in heads}, key=str)


def _candidates(rules: list) -> Iterator[frozenset]:
    atoms = _choice_atoms(rules)
    for combo in product(*[(a, a.complement()) for a in atoms]):
        chosen = set(combo)
        yield _stratified_closure(rules, chosen, {l.complement() for l in chosen})


def legal_initial_states(gp: GroundProgram) -> list:
    init = [GRule(l) for l in gp.initially]
    rules = list(gp.static) + init
    out = []
    for s0 in _candidates([r for r in rules if r.head is not None]):
        if not consistent(s0):
            continue
        kept = [GRule(r.head, r.post_pos, frozenset(), frozenset(), frozenset())
                for r in rules if not (r.post_neg & s0)]
        model, violated = least_model(kept, frozenset())
        if not violated and model == s0:
            out.append(s0)
    if not out:
        raise ContradictionInInit("no consistent initial state satisfies the static rules")
    return sorted(set(out), key=lambda s: sorted(map(str, s)))


def successors(gp: GroundProgram, s: frozenset) -> list:
    """Legal ``(action, s')`` pairs with one action per step, sorted."""
    out = []
    for a in sorted(gp.actions):
        if not executable(gp, s, a):
            continue
        acts = frozenset([Lit(a)])
        active = [r for r in gp.causation if r.head is not None and _pre_holds(r, s, acts)]
        seen = set()
        for cand in _candidates(active):
            if cand in seen or not consistent(cand):
                continue
            seen.add(cand)
            if is_legal_transition(gp, StateTransition(s, acts, cand)):
                out.append((a, cand))
    out.sort(key=lambda x: (x[0], sorted(map(str, x[1]))))
    return out


def goal_holds(gp: GroundProgram, s: frozenset) -> bool:
    return gp.goal_pos <= s and not (gp.goal_neg & s)


def trajectories(gp: GroundProgram, depth: int) -> Iterator[tuple]:
    """Every trajectory of length <= ``depth`` as ``(s0, ((a1, s1), ...))``."""
    for s0 in legal_initial_states(gp):
        stack = [(s0, ())]
        while stack:
            s, steps = stack.pop()
            yield s0, steps
            if len(steps) < depth:
                for a, s2 in reversed(successors(gp, s)):
                    stack.append((s2, steps + ((a, s2),)))


# back to nets --------------------------------------------------------------------

def lambda_state(s: Iterable[Lit], w: DawNet) -> NetState:
    """Read the marking and assignment encoded by a planning state."""
    s = set(s)
    if not consistent(s):
        raise InconsistentState("state contains a literal and its complement")
    places = {place_fluent(p): p for p in w.net.places}
    variables = {var_fluent(v): v for v in w.data.dm}
    marking, eta = {}, {}
    for l in s:
        if l.neg:
            continue
        if l.pred in places and not l.args:
            marking[places[l.pred]] = 1
        elif l.pred in variables and len(l.args) == 1:
            v = variables[l.pred]
            val = l.args[0]
            val = val if isinstance(val, int) else demangle(val)
            if v in eta and eta[v] != val:
                raise InconsistentState(f"variable {v} has two values")
            eta[v] = val
    return NetState(Marking(marking), Assignment(eta))


@dataclass
class EquivalenceReport:
    ok: bool
    cases: int
    trajectories: int
    guard_checks: int = 0
    guard_disagreements: int = 0
    counterexample: Optional[str] = None
    details: list = field(default_factory=list)

    def __str__(self) -> str:
        head = "equivalent" if self.ok else "NOT equivalent"
        s = (f"{head}: {self.cases} cases, {self.trajectories} trajectories, "
             f"{self.guard_checks} guard checks ({self.guard_disagreements} disagreements)")
        if self.counterexample:
            s += f"\ncounterexample: {self.counterexample}"
        return s


def check_equivalence(w: DawNet, depth: int, domain: Optional[PlanningDomain] = None,
                      cap: int = DEFAULT_CAP) -> EquivalenceReport:
    """Compare cases of ``w`` with trajectories of its encoding, firing by firing.

    Every case must be the image of exactly one trajectory under the state
    map and every trajectory must map to a case. Guard fluents are checked
    against direct guard evaluation in every visited state.
    """
    from ..search import oracle_cases

    wx = expand_intervals(w, ValueMode.ENUMERATE, cap)
    pd = domain if domain is not None else encode(wx)
    gp = ground(pd)
    actions = {action_name(t): t for t in wx.net.transitions}
    table = guard_table(wx)

    case_keys = set()
    for c in oracle_cases(wx, depth):
        case_keys.add((c.initial, tuple((r.transition, st) for r, st in c.steps)))

    traj_keys: dict = {}
    checked_states = set()
    checks = disagreements = 0
    problems = []
    try:
        for s0, steps in trajectories(gp, depth):
            states = [s0] + [s for _, s in steps]
            mapped = [lambda_state(s, wx) for s in states]
            for s, m in zip(states, mapped):
                if s in checked_states:
                    continue
                checked_states.add(s)
                for name, phi in table.items():
                    checks += 1
                    if (Lit(name) in s) != eval_guard(phi, wx.data, m.eta):
                        disagreements += 1
                        problems.append(f"guard {name} disagrees in state {sorted(map(str, s))}")
            key = (mapped[0], tuple((actions.get(a, a), m) for (a, _), m in zip(steps, mapped[1:])))
            traj_keys[key] = traj_keys.get(key, 0) + 1
    except InconsistentState as exc:
        return EquivalenceReport(False, len(case_keys), sum(traj_keys.values()), checks, disagreements,
                                 f"inconsistent planning state: {exc}")

    def show(key) -> str:
        return " ".join(t for t, _ in key[1]) or "<empty>"

    missing = sorted((k for k in case_keys if k not in traj_keys), key=show)
    extra = sorted((k for k in traj_keys if k not in case_keys), key=show)
    dup = sorted((k for k, n in traj_keys.items() if n > 1), key=show)
    counter = None
    if missing:
        counter = f"case without trajectory: {show(missing[0])}"
    elif extra:
        counter = f"trajectory that is not a case: {show(extra[0])}"
    elif dup:
        counter = f"case with several trajectories: {show(dup[0])}"
    elif problems:
        counter = problems[0]
    ok = counter is None
    return EquivalenceReport(ok, len(case_keys), sum(traj_keys.values()), checks, disagreements, counter,
                             problems[:20])
