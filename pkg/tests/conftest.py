import pytest

from dawnet.data import NATURAL, DataModel, Domain
from dawnet.io import bundled, parse_model, parse_trace
from dawnet.model import DawNet
from dawnet.net import PetriNet, WfNetMeta


def build(arcs, start="start", end="end", data=None, wr=None, gd=None, obs=None, places=(), transitions=()):
    """A DawNet from an arc list; nodes named like ``T*`` or ``t*`` are transitions."""
    ps, ts = set(places), set(transitions)
    for a, b in arcs:
        for n in (a, b):
            if n not in ps and n not in ts:
                (ts if n[0] in "Tt" else ps).add(n)
    ps |= {start, end}
    net = PetriNet(frozenset(ps), frozenset(ts), frozenset(arcs))
    return DawNet(net, WfNetMeta(start, end, obs or {}), data or DataModel(), wr or {}, gd or {})


def int_data(**vars_):
    """Variables over a shared natural-ordered interval domain: ``int_data(x=(0, 9))``."""
    domains, dm = {}, {}
    for v, (lo, hi) in vars_.items():
        name = f"dom_{v}"
        domains[name] = Domain(name, lo=lo, hi=hi, order=NATURAL)
        dm[v] = name
    return DataModel(domains, dm)


@pytest.fixture(scope="session")
def loan():
    return parse_model(bundled("loan.model.json"))


@pytest.fixture(scope="session")
def loan_small():
    return parse_model(bundled("loan_small.model.json"))


@pytest.fixture(scope="session")
def t3t7():
    return parse_trace(bundled("t3t7.trace.json"))


@pytest.fixture(scope="session")
def t7data():
    return parse_trace(bundled("t7data.trace.json"))


@pytest.fixture
def chain():
    return build([("start", "t"), ("t", "end")])


# one line per acceptance criterion, shown after the run
ACCEPTANCE: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
