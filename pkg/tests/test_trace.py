import pytest

from dawnet.data_model import DataModel
from dawnet.guard_lang import TRUE, And, Const, Def, Eq, Not, Var
from dawnet.model import build_rg
from dawnet.solver import replay, solve
from dawnet.trace import (END_T, START_T, Event, EventSanityViolation, Trace, TraceError, check_compliance, complete,
                          inject, is_normalized, normalize_endpoints, project, sample_cases)

from conftest import seq_net
from helpers import completion_properties


def test_event_invariants():
    with pytest.raises(TraceError):
        Event("T1", {"x": 1}, {"x"})
    assert str(Event("T7", {"request": 60000}, {"loan"})) == "T7[request=60000, -loan]"


def test_normalize(loan):
    wn = normalize_endpoints(loan)
    assert set(wn.transitions) - set(loan.transitions) == {START_T, END_T}
    assert len(wn.places) == len(loan.places) + 2
    assert len(wn.net.flow) == len(loan.net.flow) + 4
    assert is_normalized(wn) and normalize_endpoints(wn) is wn
    a, b = solve(loan), solve(wn)
    assert b.transitions() == [START_T] + a.transitions() + [END_T]


def test_inject_small_sample(small_xor):
    tw = inject(small_xor, Trace.of("B", "D"))
    new_t = set(tw.net.transitions) - set(small_xor.transitions) - {START_T, END_T}
    new_p = set(tw.net.places) - set(normalize_endpoints(small_xor).places)
    assert len(new_t) == 2 and len(new_p) == 3
    pe, te = tw.event_place_of, tw.event_transition_of
    flow = tw.net.net.flow
    assert (START_T, pe[0]) in flow and (pe[2], END_T) in flow
    assert {(pe[0], te[0]), (te[0], pe[1]), (pe[1], te[1]), (te[1], pe[2])} <= flow
    # the copies keep the original arcs
    assert ("start", te[0]) in flow and (te[1], "end") in flow
    res = solve(tw.net)
    case = project(tw, res.witness)
    assert [s.transition for s in case] == [START_T, "B", "D", END_T]
    assert len(case) == len(res.witness)


def test_inject_empty_trace(small_xor):
    tw = inject(small_xor, Trace())
    assert len(tw.event_place_of) == 1 and not tw.event_transition_of
    p0 = tw.event_place_of[0]
    assert tw.net.net.preset(p0) == {START_T} and tw.net.net.postset(p0) == {END_T}


def test_inject_loan_observed_data(loan):
    tw = inject(loan, Trace.of(("T7", {"request": 60000, "loan": 50000})))
    te = tw.event_transition_of[0]
    # loan is written by T7 so it is pinned; request is not, so it becomes a guard conjunct
    assert tw.net.writes[te] == {"loan": (50000,)}
    assert tw.net.guards[te] == And(loan.guards["T7"], Eq(Var("request"), Const(60000)))


def test_inject_deleted_unwritten_becomes_guard():
    dm = DataModel.create({"v": [1]})
    w = seq_net("a", "b", data=dm, writes={"a": {"v": (1,)}})
    tw = inject(w, Trace((Event("b", {}, {"v"}),)))
    assert tw.net.guards[tw.event_transition_of[0]] == And(TRUE, Not(Def("v")))
    assert complete(w, Trace((Event("b", {}, {"v"}),))).reachable is False


def test_event_sanity(loan):
    with pytest.raises(EventSanityViolation):
        inject(loan, Trace.of(("T1", {"loanType": "x"})))
    with pytest.raises(EventSanityViolation):
        inject(loan, Trace.of(("T6", {"loan": 50000})))
    with pytest.raises(EventSanityViolation):
        inject(loan, Trace.of("T99"))
    with pytest.raises(EventSanityViolation):
        inject(loan, Trace((Event("T1", {}, {"loanType"}),)))


def test_compliance(loan):
    happy = None
    for case in sample_cases(loan, 9):
        if [s.transition for s in case] == ["T1", "T3", "T5", "T7", "T9", "T10", "T11", "T12"]:
            happy = case
            break
    assert happy is not None
    assert check_compliance(loan, happy, Trace.of("T3", "T7")) == {0: 1, 1: 3}
    assert check_compliance(loan, happy, Trace()) == {}
    assert check_compliance(loan, happy, Trace.of("T7", "T3")) is None


def test_compliance_needs_backtracking(small_xor):
    dm = DataModel.create({"v": [1, 2]})
    w = seq_net("a", "a2", "b", data=dm, writes={"a": {"v": (1, 2)}, "a2": {"v": (1, 2)}})
    from dawnet.model import fire_data
    from dawnet.solver import Step
    s0 = w.initial_state()
    s1 = fire_data(w, s0, "a", {"v": 1})
    s2 = fire_data(w, s1, "a2", {"v": 2})
    s3 = fire_data(w, s2, "b")
    case = [Step("a", {"v": 1}, s1), Step("a2", {"v": 2}, s2), Step("b", {}, s3)]
    assert check_compliance(w, case, Trace.of(("b", {"v": 2}))) == {0: 2}
    assert check_compliance(w, case, Trace.of(("b", {"v": 1}))) is None


def test_loan_completion_worker_path(loan):
    c = complete(loan, Trace.of(("T7", {"request": 60000, "loan": 50000})))
    assert c.reachable
    ts = [s.transition for s in c.case]
    assert ts[:4] == ["T1", "T3", "T5", "T7"]
    assert c.case[0].choice == {"loanType": "w"}
    assert c.case[2].choice == {"request": 60000}
    assert c.observed == tuple(t == "T7" for t in ts)
    assert loan.is_final(replay(loan, c.case))


def test_complete_already_complete_trace(loan):
    full = solve(loan)
    tau = Trace(tuple(Event(s.transition, s.choice) for s in full.witness))
    c = complete(loan, tau)
    assert c.reachable and [s.transition for s in c.case] == full.transitions()
    assert all(c.observed)


def test_complete_non_compliant(loan):
    assert complete(loan, Trace.of("T2", "T8")).reachable is False
    assert complete(loan, Trace.of("T1", "T1")).reachable is False


def test_complete_empty_trace(loan):
    c = complete(loan, Trace())
    assert c.reachable and not any(c.observed)


def test_loan_trace_workflow_is_safe(loan):
    rg = build_rg(inject(loan, Trace.of("T3", "T7")).net)
    assert all(max(s.marking.counts) <= 1 for s in rg.states)


def test_completion_properties_small():
    thm, safe = completion_properties(80, seed=21)
    assert thm.ok, thm.failures[:5]
    assert safe.ok, safe.failures[:5]
