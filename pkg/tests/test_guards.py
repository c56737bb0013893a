import pytest
from hypothesis import given, settings, strategies as st

from dawnet.data import NATURAL, DataModel, Domain
from dawnet.errors import GuardSyntaxError, NetError, UnknownVariable
from dawnet.guards import (
    FALSE, TRUE, And, Const, Def, Eq, Leq, Not, Var, eval_guard, parse_guard, pretty, substitute,
)

DM = DataModel(
    {
        "amount": Domain("amount", lo=0, hi=1000000, order=NATURAL),
        "kind": Domain("kind", frozenset({"s", "w"})),
        "level": Domain("level", frozenset({"lo", "mid", "hi"}),
                        order=frozenset({("lo", "mid"), ("mid", "hi"), ("lo", "hi")})),
    },
    {"request": "amount", "loan": "amount", "x": "amount", "y": "amount", "loanType": "kind",
     "a": "kind", "b": "kind", "lv": "level"},
)


def test_parse_leq():
    assert parse_guard("request <= 5000", DM) == Leq(Var("request"), Const(5000))


def test_parse_true():
    assert parse_guard("true", DM) == TRUE


def test_parse_negated_leq():
    assert parse_guard("!(request <= 99999)", DM) == Not(Leq(Var("request"), Const(99999)))


def test_parse_sugar():
    # strict order stays correct on partial orders: b <= a and not a <= b
    assert parse_guard("request > 5", DM) == And(Leq(Const(5), Var("request")), Not(Leq(Var("request"), Const(5))))
    assert parse_guard("request >= 5", DM) == Leq(Const(5), Var("request"))
    assert parse_guard("x != y", DM) == Not(Eq(Var("x"), Var("y")))
    assert parse_guard("false", DM) == FALSE
    g = parse_guard("def(x) || def(y)", DM)
    assert g == Not(And(Not(Def("x")), Not(Def("y"))))


def test_parse_atoms():
    assert parse_guard('loanType = "w"', DM) == Eq(Var("loanType"), Const("w"))
    # bare names that are not variables resolve to known atoms
    assert parse_guard("loanType = w", DM) == Eq(Var("loanType"), Const("w"))


def test_parse_errors():
    with pytest.raises(GuardSyntaxError):
        parse_guard("request <=", DM)
    with pytest.raises(UnknownVariable):
        parse_guard("nosuch <= 3", DM)


def test_eval_def_empty():
    assert eval_guard(Def("x"), DM, {}) is False


def test_eval_leq_and_not():
    g = Leq(Var("request"), Const(99999))
    assert eval_guard(g, DM, {"request": 60000})
    assert not eval_guard(Not(g), DM, {"request": 60000})


def test_eval_eq_unbound():
    assert eval_guard(Eq(Var("x"), Var("y")), DM, {"x": 1}) is False


def test_eval_eq_type_strict():
    assert not eval_guard(Eq(Const(1), Const("1")), DM, {})


def test_eval_explicit_order():
    assert eval_guard(Leq(Var("lv"), Const("hi")), DM, {"lv": "lo"})
    assert not eval_guard(Leq(Var("lv"), Const("lo")), DM, {"lv": "hi"})


def test_eval_unordered_leq_false():
    assert not eval_guard(Leq(Var("a"), Var("b")), DM, {"a": "s", "b": "s"})


def test_substitute_examples():
    assert substitute(Leq(Var("request"), Const(5000)), {"request": 3000}) == Leq(Const(3000), Const(5000))
    assert substitute(TRUE, {"x": 1}) == TRUE
    assert substitute(Eq(Var("a"), Var("b")), {"a": 1}) == Eq(Const(1), Var("b"))


def test_domain_order_checks():
    with pytest.raises(NetError):
        Domain("d", frozenset({"a", "b"}), order=frozenset({("a", "b"), ("b", "a")}))
    with pytest.raises(NetError):
        Domain("d", frozenset({"a", "b", "c"}), order=frozenset({("a", "b"), ("b", "c")}))
    d = Domain("d", frozenset({"a", "b"}), order=frozenset({("a", "b")}))
    assert d.leq("a", "a") and d.leq("a", "b") and not d.leq("b", "a")


def test_data_model_rejects_bad_names():
    with pytest.raises(NetError):
        DataModel({"k": Domain("k", frozenset({"s"}))}, {"def": "k"})
    with pytest.raises(NetError):
        DataModel({}, {"x": "missing"})


# properties ------------------------------------------------------------------

VARS = {"x": "amount", "y": "amount", "a": "kind", "b": "kind", "lv": "level"}
VALUES = {"amount": st.integers(0, 6), "kind": st.sampled_from(["s", "w"]),
          "level": st.sampled_from(["lo", "mid", "hi"])}


def terms():
    return st.one_of(
        st.sampled_from(sorted(VARS)).map(Var),
        st.integers(0, 6).map(Const),
        st.sampled_from(["s", "w", "lo", "hi"]).map(Const),
    )


guards = st.recursive(
    st.one_of(
        st.just(TRUE),
        st.sampled_from(sorted(VARS)).map(Def),
        st.builds(Eq, terms(), terms()),
        st.builds(Leq, terms(), terms()),
    ),
    lambda inner: st.one_of(st.builds(Not, inner), st.builds(And, inner, inner)),
    max_leaves=8,
)


@st.composite
def assignments(draw):
    eta = {}
    for v, dname in VARS.items():
        if draw(st.booleans()):
            eta[v] = draw(VALUES[dname])
    return eta


@settings(max_examples=400, deadline=None)
@given(guards, assignments())
def test_substitution_preserves_truth(g, eta):
    assert eval_guard(g, DM, eta) == eval_guard(substitute(g, eta), DM, eta)


@settings(max_examples=300, deadline=None)
@given(guards, assignments())
def test_double_negation(g, eta):
    assert eval_guard(Not(Not(g)), DM, eta) == eval_guard(g, DM, eta)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(["s", "w"]), st.sampled_from(["s", "w"]))
def test_leq_without_order_is_false(p, q):
    assert not eval_guard(Leq(Const(p), Const(q)), DM, {})


@settings(max_examples=500, deadline=None)
@given(guards)
def test_pretty_parse_roundtrip(g):
    assert parse_guard(pretty(g), DM) == g
