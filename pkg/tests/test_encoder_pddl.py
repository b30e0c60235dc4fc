from dawnet.data_model import DataModel
from dawnet.encoder_bc import NULL
from dawnet.encoder_pddl import (ActionTemplate, Obj, Par, PEq, PNot, POr, PRel, SV, _and, encode_pddl, encode_sv,
                                 lower_classical, psi, psi_inverse, with_old_value_links)
from dawnet.encoding_check import check_pddl
from dawnet.guard_lang import parse
from dawnet.model import build_rg
from dawnet.ref_semantics import ts_pddl

from conftest import seq_net


def _template(d, origin):
    return [a for a in d.templates if a.origin == origin]


def test_loan_t4_template(loan):
    d, s0, goal = encode_sv(loan)
    (t4,) = _template(d, "T4")
    assert t4.params == ("z_request",)
    assert PRel("wr_T4_request", (Par("z_request"),)) in t4.pre.parts
    assert {x for (x,) in d.rigid["wr_T4_request"]} == {0, 1000, 3000, 5000, 30000}
    assert ("request", Par("z_request")) in t4.eff


def test_no_write_template_and_delete(loan):
    d, _, _ = encode_sv(loan)
    (t9,) = _template(d, "T9")
    assert t9.params == ()
    dm = DataModel.create({"v": [1]})
    w = seq_net("a", "b", data=dm, writes={"a": {"v": (1,)}, "b": {"v": ()}})
    d, _, _ = encode_sv(w)
    assert d.rigid["wr_b_v"] == {(NULL,)}


def test_guard_translation():
    dm = DataModel.create({"v": [1, 5000]})
    w = seq_net("t", data=dm, guards={"t": parse("v <= 5000 && def(v) && v = 1")})
    d, _, _ = encode_sv(w)
    pre = d.templates[0].pre.parts
    assert PRel("ord", (SV("v"), Obj(5000))) in pre
    assert PNot(PEq(SV("v"), Obj(NULL))) in pre
    assert PEq(SV("v"), Obj(1)) in pre
    assert (1, 5000) in d.rigid["ord"] and (5000, 1) not in d.rigid["ord"]


def test_lowering_splits_disjunctions():
    t = ActionTemplate("t", (), POr((PEq(SV("p"), Obj(True)), PEq(SV("q"), Obj(True)))), (), "t")
    u = ActionTemplate("u", (), _and([PEq(SV("p"), Obj(True))]), (), "u")
    from dawnet.encoder_pddl import SvDomain
    d = SvDomain("x", (NULL,), (("p", (False, True)), ("q", (False, True))), {}, (t, u), {"p": "p", "q": "q"}, {})
    low = lower_classical(d)
    assert [a.name for a in low.templates] == ["t_1", "t_2", "u"]
    assert low.surjection() == {"t_1": "t", "t_2": "t", "u": "u"}
    assert low.templates[2].pre == u.pre


def test_lowering_lifts_state_variables():
    dm = DataModel.create({"v": [1, 5000]})
    w = seq_net("t", data=dm, guards={"t": parse("v <= 5000")})
    d, _, _ = encode_sv(w)
    low = lower_classical(d)
    (a,) = low.templates
    assert "x_v" in a.params and a.param_var["x_v"] == "v"
    assert PRel("ord", (Par("x_v"), Obj(5000))) in a.pre.parts
    assert PEq(SV("v"), Par("x_v")) in a.pre.parts


def test_psi_bijection(loan, m1):
    for w in (loan, m1):
        d, _, _ = encode_sv(w)
        rg = build_rg(w)
        images = set()
        for s in rg.states:
            q = psi(d, w, s)
            assert psi_inverse(d, w, q) == s
            images.add(q)
        assert len(images) == len(rg.states)


def test_gamma_matches_firings(loan):
    """Each RG edge is a ground action between the encoded states, and nothing else is."""
    d, s0, _ = encode_sv(loan)
    low = with_old_value_links(lower_classical(d))
    ts = ts_pddl(low, s0)
    rg = build_rg(loan)
    for i, s in enumerate(rg.states):
        want = {(t, psi(d, loan, rg.states[j])) for t, j in rg.successors_of(i)}
        assert set(ts.successors(psi(d, loan, s))) == want


def test_ts_pddl_grounding(loan):
    d, s0, _ = encode_sv(loan)
    ts = ts_pddl(d, s0)
    succ = ts.successors(s0)
    assert len(succ) == 2 and {t for t, _ in succ} == {"T1"}


def test_print_pddl(loan):
    dom, prob = encode_pddl(loan)
    assert "(marked_p1)" in dom and "(value ?var - variable ?val - value)" in dom
    assert "(:goal (and (marked_end) (not (marked_p1))" in prob
    assert "(:init\n    (marked_start)\n" in prob
    assert encode_pddl(loan) == (dom, prob)
    assert "\r" not in dom + prob


def test_print_pddl_without_data():
    dom, prob = encode_pddl(seq_net("t"))
    assert "(value " not in dom and "variable" not in dom.split("(:constants")[1].split(")")[0]
    assert "(:goal (and (marked_end) (not (marked_start))))" in prob


def test_mangling_is_case_insensitive():
    dm = DataModel.create({"Amount": [1], "amount": [2]})
    w = seq_net("T", "t", data=dm, writes={"T": {"Amount": (1,)}, "t": {"amount": (2,)}})
    dom, _ = encode_pddl(w)
    assert "var_amount " in dom and "var_amount_1" in dom
    assert "(:action t\n" in dom and "(:action t_1\n" in dom
    assert "?z_amount_1" in dom


def test_trace_equivalence(loan, m1):
    assert check_pddl(loan, 8)
    assert check_pddl(loan, 8, lowered=False)
    assert check_pddl(m1, 6)
