
import pytest

from dawnet.bench import MODELS, build_model
from dawnet.generators import random_net_trace_pairs, random_suite
from dawnet.modelfile import ModelSyntaxError, bundled_path, format_model, load_bundled, parse_model
from dawnet.trace import Event, Trace
from dawnet.tracefile import TraceSyntaxError, format_trace, parse_trace, parse_xes

SAMPLE = """\
model demo   # a comment
variables
  level in {"hi", "lo", "mid"} order "lo" < "mid" < "hi"
  n in 0..3
  ok in {true, false}

places
  start p1
  end

transitions
  a write n in {1, 2}
  a write ok in {true}
  b guard level <= "mid" && n = 2
  b write n := delete

arcs
  start -> a -> p1 -> b -> end
"""


def test_parse_sample():
    w = parse_model(SAMPLE)
    assert w.name == "demo"
    assert w.data.domain("n") == (0, 1, 2, 3)
    assert w.data.leq("lo", "hi")
    assert w.writes["b"] == {"n": ()}
    assert w.writes["a"] == {"n": (1, 2), "ok": (True,)}


def test_format_is_canonical():
    w = parse_model(SAMPLE)
    text = format_model(w)
    assert format_model(parse_model(text)) == text
    assert parse_model(text) == w


def test_bundled_round_trip(loan):
    for name in ("loan", "loan_full", "m1"):
        text = bundled_path(name).read_text(encoding="utf-8")
        w = parse_model(text)
        assert format_model(parse_model(format_model(w))) == format_model(w)
    assert load_bundled("m1") == build_model("M1")


def test_random_models_round_trip():
    for w in random_suite(3, 100) + [build_model(m) for m in MODELS]:
        text = format_model(w)
        back = parse_model(text)
        assert back == w.replace(name=back.name) or back == w
        assert format_model(back) == text


@pytest.mark.parametrize("text, line", [
    ("  start\nplaces\n", 1),
    ("variables\n  x in {1, 2\n", 2),
    ("variables\n  x in {1}\n  x in {2}\n", 3),
    ("places\n  start end\ntransitions\n  t guard x = \narcs\n", 4),
    ("places\n  start end\ntransitions\n  t\narcs\n  start -> t -> nowhere\n", 6),
    ("places\n  start end\ntransitions\n  t\narcs\n  start -> end\n", 6),
])
def test_model_diagnostics(text, line):
    with pytest.raises(ModelSyntaxError) as e:
        parse_model(text)
    assert e.value.line == line


def test_model_not_wf_is_reported():
    with pytest.raises(ModelSyntaxError):
        parse_model("places\n  a b\ntransitions\n  t\narcs\n  a -> t\n")


# ---------------------------------------------------------------- traces

def test_parse_trace():
    tau = parse_trace('T1\nT7 {request = 60000, loan = 50000}  # observed\n\nT9 {; deleted: loan}\nT2 {x = "a,b # c"}\n')
    assert [e.transition for e in tau] == ["T1", "T7", "T9", "T2"]
    assert tau[1].written == {"loan": 50000, "request": 60000}
    assert tau[2].deleted == {"loan"}
    assert tau[3].written == {"x": "a,b # c"}


def test_trace_round_trip():
    for _, tau in random_net_trace_pairs(9, 100):
        assert parse_trace(format_trace(tau)) == tau
    tau = Trace((Event("t", {"s": 'q"uote', "b": True, "n": -3}, {"d"}),))
    assert parse_trace(format_trace(tau)) == tau
    assert format_trace(Trace()) == ""


@pytest.mark.parametrize("text, line", [
    ("T1\nT2 {x}\n", 2),
    ("T1 {x = 1, x = 2}\n", 1),
    ("T1 {x = 1.5}\n", 1),
    ("T1 {x = 1; gone: y}\n", 1),
    ("T1 {x = 1; deleted: x}\n", 1),
    ("1bad\n", 1),
])
def test_trace_diagnostics(text, line):
    with pytest.raises(TraceSyntaxError) as e:
        parse_trace(text)
    assert e.value.line == line


XES = """<?xml version="1.0" encoding="UTF-8"?>
<log xmlns="http://www.xes-standard.org/" xes.version="1.0">
  <trace>
    <string key="concept:name" value="case1"/>
    <event>
      <string key="concept:name" value="T1"/>
      <string key="lifecycle:transition" value="complete"/>
      <date key="time:timestamp" value="2011-01-01T00:00:00"/>
      <string key="loanType" value="w"/>
    </event>
    <event>
      <string key="concept:name" value="T7"/>
      <int key="request" value="60000"/>
      <string key="loan" value="50000"/>
      <string key="dawnet:deleted" value="x, y"/>
    </event>
  </trace>
  <trace>
    <event><string key="concept:name" value="T2"/><boolean key="flag" value="true"/></event>
  </trace>
</log>
"""


def test_parse_xes(loan):
    tau = parse_xes(XES, data=loan.data)
    assert [e.transition for e in tau] == ["T1", "T7"]
    assert tau[0].written == {"loanType": "w"}
    # a numeric string for an integer variable is read as an integer
    assert tau[1].written == {"loan": 50000, "request": 60000}
    assert tau[1].deleted == {"x", "y"}
    assert parse_xes(XES)[1].written["loan"] == "50000"
    assert parse_xes(XES, index=1)[0].written == {"flag": True}


def test_xes_errors():
    with pytest.raises(ValueError):
        parse_xes(XES, index=2)
    bad = XES.replace('<boolean key="flag" value="true"/>', '<float key="f" value="1.5"/>')
    with pytest.raises(ValueError):
        parse_xes(bad, index=1)
    with pytest.raises(ValueError):
        parse_xes("<log><trace><event><int key='a' value='1'/></event></trace></log>")
