import random
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from dawnet.data import DataModel, Domain
from dawnet.errors import InconsistentState, UnboundedVariable
from dawnet.frozen import Assignment
from dawnet.guards import parse_guard
from dawnet.model import ExplicitSet, NetState
from dawnet.net import Marking
from dawnet.planning.encoder import encode
from dawnet.planning.interp import (
    GRule, StateTransition, check_equivalence, goal_holds, ground, is_legal_transition, lambda_state,
    least_model, legal_initial_states, reduct, successors, trajectories,
)
from dawnet.planning.syntax import Lit, parse

from conftest import build
from oracles import fit_depth
from randnets import random_dawnet


@pytest.fixture
def two_step():
    data = DataModel({"d": Domain("d", frozenset({"a", "b"}))}, {"v": "d"})
    return build([("start", "t1"), ("t1", "p1"), ("p1", "t2"), ("t2", "end")], data=data,
                 wr={"t1": {"v": ExplicitSet(frozenset({"a", "b"}))}},
                 gd={"t2": parse_guard("v = a", data)})


@pytest.fixture
def diamond():
    return build([("start", "t0"), ("t0", "a"), ("t0", "b"), ("a", "ta"), ("b", "tb"),
                  ("ta", "a2"), ("tb", "b2"), ("a2", "tj"), ("b2", "tj"), ("tj", "end")])


def L(name, *args, neg=False):
    return Lit(name, tuple(args), neg)


def test_ground_choice_rules(two_step):
    gp = ground(encode(two_step))
    pos = [r for r in gp.causation if r.head is not None and r.head.pred == "var_v" and L("t1") in r.pre_pos]
    assert {r.head for r in pos} == {L("var_v", "a"), L("var_v", "b"), L("var_v", "a", neg=True),
                                      L("var_v", "b", neg=True)}
    assert len([r for r in pos if not r.head.neg]) == 2 and len([r for r in pos if r.head.neg]) == 2


def test_ground_unbounded_variable():
    pd = parse("fluents: p. q(X) requires dom(X).\nactions: a.\nalways: caused q(X) if not p.\n")
    with pytest.raises(UnboundedVariable):
        ground(pd)


def test_initial_state_chain(chain):
    gp = ground(encode(chain))
    (s0,) = legal_initial_states(gp)
    assert L("start") in s0 and L("end") not in s0
    assert L("guard_1") in s0


def test_reduct_drops_blocked_rules(chain):
    gp = ground(encode(chain))
    (s0,) = legal_initial_states(gp)
    st_ok = StateTransition(s0, frozenset({L("t")}), frozenset({L("start", neg=True), L("end"), L("guard_1")}))
    red = reduct(gp, st_ok)
    # start inertia is blocked because -start holds in the successor
    assert not any(r.head == L("start") for r in red)
    assert all(not r.post_neg and not r.pre_neg for r in red)
    model, violated = least_model(red, s0 | st_ok.actions)
    assert model == st_ok.to and not violated
    assert is_legal_transition(gp, st_ok)


def test_legality_rejects_non_minimal_and_empty(chain):
    gp = ground(encode(chain))
    (s0,) = legal_initial_states(gp)
    bigger = frozenset({L("start", neg=True), L("end"), L("guard_1"), L("extra")})
    assert not is_legal_transition(gp, StateTransition(s0, frozenset({L("t")}), bigger))
    assert not is_legal_transition(gp, StateTransition(s0, frozenset(), s0))


def test_two_actions_are_illegal(diamond):
    gp = ground(encode(diamond))
    (s0,) = legal_initial_states(gp)
    ((_, s1),) = successors(gp, s0)
    assert [a for a, _ in successors(gp, s1)] == ["ta", "tb"]
    both = (s1 - {L("a"), L("b")}) | {L("a", neg=True), L("b", neg=True), L("a2"), L("b2")}
    assert not is_legal_transition(gp, StateTransition(s1, frozenset({L("ta"), L("tb")}), both))


def test_least_model_false_head():
    model, violated = least_model([GRule(L("a")), GRule(None, frozenset({L("a")}))], frozenset())
    assert model == {L("a")} and violated


def test_successors_choose_value(two_step):
    gp = ground(encode(two_step))
    (s0,) = legal_initial_states(gp)
    succ = successors(gp, s0)
    assert [a for a, _ in succ] == ["t1", "t1"]
    values = {lambda_state(s, two_step).eta["v"] for _, s in succ}
    assert values == {"a", "b"}
    for _, s in succ:
        assert lambda_state(s, two_step).marking == Marking({"p1": 1})


def test_guard_blocks_successor(two_step):
    gp = ground(encode(two_step))
    (s0,) = legal_initial_states(gp)
    by_value = {lambda_state(s, two_step).eta["v"]: s for _, s in successors(gp, s0)}
    assert [a for a, _ in successors(gp, by_value["a"])] == ["t2"]
    assert successors(gp, by_value["b"]) == []
    ((_, end),) = successors(gp, by_value["a"])
    assert goal_holds(gp, end)


def test_lambda_state(two_step):
    s = {L("p1"), L("var_v", "a"), L("var_def_v"), L("start", neg=True)}
    assert lambda_state(s, two_step) == NetState(Marking({"p1": 1}), Assignment({"v": "a"}))
    with pytest.raises(InconsistentState):
        lambda_state({L("p1"), L("p1", neg=True)}, two_step)
    with pytest.raises(InconsistentState):
        lambda_state({L("var_v", "a"), L("var_v", "b")}, two_step)


def test_chain_equivalence(chain):
    rep = check_equivalence(chain, 4)
    assert rep.ok and rep.cases == 2 and rep.trajectories == 2


def test_trajectories_include_prefixes(chain):
    gp = ground(encode(chain))
    assert sorted(len(steps) for _, steps in trajectories(gp, 4)) == [0, 1]


def test_dropped_inertia_rule_is_detected(diamond):
    pd = encode(diamond)
    rules = tuple(r for r in pd.rules if str(r) != "caused a if not -a after a.")
    assert len(rules) == len(pd.rules) - 1
    assert check_equivalence(diamond, 4).ok
    rep = check_equivalence(diamond, 4, domain=replace(pd, rules=rules))
    assert not rep.ok and rep.counterexample


def test_dropped_variable_inertia_is_detected(two_step):
    pd = encode(two_step)
    rules = tuple(r for r in pd.rules if not str(r).startswith("caused var_v(X) if not -var_v(X)"))
    rep = check_equivalence(two_step, 4, domain=replace(pd, rules=rules))
    assert not rep.ok


# properties ------------------------------------------------------------------------

@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_random_nets_equivalent(seed):
    rng = random.Random(seed)
    w = random_dawnet(rng, max_places=7, max_transitions=6)
    rep = check_equivalence(w, fit_depth([w], 8, 2000))
    assert rep.ok, rep.counterexample
    assert rep.guard_disagreements == 0
