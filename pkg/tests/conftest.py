import pytest

from dawnet.core_net import PetriNet
from dawnet.data_model import DataModel
from dawnet.model import DawNet
from dawnet.modelfile import load_bundled


@pytest.fixture(scope="session")
def loan():
    return load_bundled("loan")


@pytest.fixture(scope="session")
def m1():
    return load_bundled("m1")


def seq_net(*transitions, data=None, writes=None, guards=None):
    """start -> t1 -> p1 -> ... -> tn -> end, as a DAW-net."""
    places = ["start"] + [f"p{i}" for i in range(1, len(transitions))] + ["end"]
    arcs = set()
    for i, t in enumerate(transitions):
        arcs |= {(places[i], t), (t, places[i + 1])}
    net = PetriNet.build(places, transitions, arcs)
    return DawNet(net, data or DataModel.create({}), writes or {}, guards or {})


@pytest.fixture
def small_xor():
    """The B/C choice followed by D, as in the trace injection sample."""
    net = PetriNet.build(["start", "p1", "end"], ["B", "C", "D"],
                         {("start", "B"), ("start", "C"), ("B", "p1"), ("C", "p1"), ("p1", "D"), ("D", "end")})
    return DawNet(net, DataModel.create({}), {}, {})


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for i in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[i].line())
