from dawnet.data_model import DataModel
from dawnet.encoder_smv import (ENDED, LAST, TR, UNDEF, SIn, build_rg_tilde, encode_smv, ltl_goal, print_smv,
                                smv_state_key)
from dawnet.encoding_check import check_smv
from dawnet.guard_lang import TRUE, Not
from dawnet.model import build_rg
from dawnet.ref_semantics import ts_smv
from dawnet.trace import normalize_endpoints

from conftest import seq_net


def test_tr_domain(loan):
    m = encode_smv(loan)
    assert set(m.tokens(TR)) == {f"t_T{i}" for i in range(1, 13)} | {LAST, ENDED}
    mn = encode_smv(normalize_endpoints(loan))
    assert {"t_start_t", "t_end_t"} <= set(mn.tokens(TR))
    assert len(mn.tokens(TR)) == 16


def test_delete_posts_undef():
    dm = DataModel.create({"v": [1, 2]})
    w = seq_net("a", "b", data=dm, writes={"a": {"v": (1, 2)}, "b": {"v": ()}})
    text = print_smv(encode_smv(w))
    block_b = text.split("tr = t_b :")[1].split(";")[0]
    assert "next(v_v) = undef" in block_b
    assert "next(v_v) in {1, 2}" in text.split("tr = t_a :")[1].split(";")[0]


def test_single_transition_init():
    ts = ts_smv(encode_smv(seq_net("t")))
    assert len(ts.initial) == 1 and dict(ts.initial[0])[TR] == "t_t"


def test_dead_initial_state_init_forces_last():
    w = seq_net("t", guards={"t": Not(TRUE)})
    ts = ts_smv(encode_smv(w))
    (q0,) = ts.initial
    assert dict(q0)[TR] == LAST
    ((label, q1),) = ts.successors(q0)
    assert label == LAST and dict(q1)[TR] == ENDED
    assert all(v in ("FALSE", UNDEF) for k, v in q1 if k != TR)
    assert ts.successors(q1) == [(ENDED, q1)]


def test_ltl_goal(loan):
    assert ltl_goal(seq_net("t")) == "LTLSPEC G !(p_end & !p_start)"
    goal = ltl_goal(loan)
    assert goal.startswith("LTLSPEC G !(p_end & ") and goal.count("!p_") == len(loan.places) - 1
    assert print_smv(encode_smv(loan)).rstrip().endswith(goal)


def test_rg_tilde_dead_initial():
    w = seq_net("t", guards={"t": Not(TRUE)})
    rgt = build_rg_tilde(build_rg(w), w)
    assert len(rgt.states) == 2
    assert sum(len(v) for v in rgt.edges.values()) == 2
    (s0,) = rgt.initial
    assert s0[1] == LAST


def test_rg_tilde_state_count(loan):
    rg = build_rg(loan)
    rgt = build_rg_tilde(rg, loan)
    labels = {}
    for a, t, _ in rg.edges:
        labels.setdefault(a, set()).add(t)
    # one state per (RG state, outgoing label), one `last` state per dead end, plus s_eps
    want = sum(len(labels.get(i, ())) or 1 for i in range(len(rg.states))) + 1
    assert len(rgt.states) == want
    dead = sum(1 for i in range(len(rg.states)) if i not in labels)
    assert sum(1 for s in rgt.states if s[1] == LAST) == dead


def test_rg_tilde_paths_are_infinite(loan):
    rgt = build_rg_tilde(build_rg(loan), loan)
    assert all(rgt.edges[s] for s in rgt.states)


def test_enc_is_a_bijection_onto_reachable_states(loan):
    m = encode_smv(loan)
    rgt = build_rg_tilde(build_rg(loan), loan)
    images = {smv_state_key(m, loan, s) for s in rgt.states}
    assert len(images) == len(rgt.states)
    ts = ts_smv(m)
    assert ts.explore(60) == images
    assert set(ts.initial) == {smv_state_key(m, loan, s) for s in rgt.initial}


def test_rules_partition_tr(loan):
    m = encode_smv(loan)
    keys = []
    for pre, _ in m.rules:
        assert isinstance(pre, SIn) and pre.var == TR
        keys.extend(pre.tokens)
    assert sorted(keys) == sorted(m.tokens(TR))


def test_trace_equivalence(loan, m1):
    assert check_smv(loan, 12)
    assert check_smv(m1, 8)


def test_deterministic_text(loan):
    assert print_smv(encode_smv(loan)) == print_smv(encode_smv(loan))
