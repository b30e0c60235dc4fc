import pytest

from dawnet.data_model import DataModel, UnknownVariable
from dawnet.guard_lang import (TRUE, And, Const, ConstantOutsideDomains, Def, DnfBlowup, EqLit, Eq,
                               GuardSyntaxError, Leq, Not, NotDefLit, Var, active_domain, evaluate, parse,
                               to_ground_dnf)

from helpers import guard_adm_restriction, guard_dnf_agreement, guard_roundtrip

LOAN_DM = DataModel.create({"request": [0, 3000, 5000, 60000, 99999], "loanType": ["s", "w"]})


def test_parse_examples():
    assert parse("request <= 5000") == Leq(Var("request"), Const(5000))
    assert parse("!(request <= 99999)") == Not(Leq(Var("request"), Const(99999)))
    assert parse("true") == TRUE
    assert parse('loanType = "w" && def(request)') == And(Eq(Var("loanType"), Const("w")), Def("request"))
    assert parse("x = false") == Eq(Var("x"), Const(False))


def test_parse_precedence_and_grouping():
    assert parse("!x = 1") == Not(Eq(Var("x"), Const(1)))
    assert parse("a = 1 && b = 2 && c = 3") == And(And(Eq(Var("a"), Const(1)), Eq(Var("b"), Const(2))), Eq(Var("c"), Const(3)))
    assert parse("((true))") == TRUE


@pytest.mark.parametrize("text", ["", "x =", "x <= ", "def(1)", "(true", "true &&", "x == 1", "1 = x", "true true"])
def test_parse_errors(text):
    with pytest.raises(GuardSyntaxError):
        parse(text)


def test_parse_checks_against_model():
    with pytest.raises(UnknownVariable):
        parse("amount <= 3", LOAN_DM)
    with pytest.raises(ConstantOutsideDomains):
        parse("request <= 7", LOAN_DM)


def test_evaluate_examples():
    assert evaluate(parse("request <= 5000"), LOAN_DM, {"request": 3000})
    assert not evaluate(Eq(Var("loanType"), Var("loanType")), LOAN_DM, {})
    assert not evaluate(Def("x"), LOAN_DM, {})
    # a comparison with an unassigned variable is false, so its negation is true
    assert evaluate(parse("!(request <= 5000)"), LOAN_DM, {})
    assert not evaluate(parse('request <= "s"'), LOAN_DM, {"request": 0})


def test_active_domain():
    assert active_domain(parse("request <= 5000")) == (5000,)
    assert active_domain(TRUE) == ()
    assert set(active_domain(parse("x = 1 && !(y = 2)"))) == {1, 2}


def test_dnf_examples():
    dm = DataModel.create({"v": ["a", "b"], "u": ["o", "p", "q"]})
    ranges = {"v": ("a", "b"), "u": ("o", "p", "q")}
    d = to_ground_dnf(Def("v"), dm, ranges)
    assert d.clauses == ((EqLit("v", "a"),), (EqLit("v", "b"),))
    d = to_ground_dnf(Not(Eq(Var("u"), Const("o"))), dm, ranges)
    assert d.clauses == ((EqLit("u", "p"),), (EqLit("u", "q"),))
    assert "u" in d.undef_caveat
    strict = to_ground_dnf(Not(Eq(Var("u"), Const("o"))), dm, ranges, strict_undef=True)
    assert (NotDefLit("u"),) in strict.clauses
    assert to_ground_dnf(TRUE, dm, ranges).clauses == ((),)
    assert to_ground_dnf(Not(TRUE), dm, ranges).clauses == ()


def test_dnf_leq_over_range():
    d = to_ground_dnf(parse("!(request <= 5000)"), LOAN_DM, {"request": LOAN_DM.domain("request")})
    assert {c[0].value for c in d.clauses} == {60000, 99999}


def test_dnf_blowup():
    dm = DataModel.create({f"x{i}": [0, 1, 2, 3] for i in range(8)})
    phi = TRUE
    for i in range(8):
        phi = And(phi, Def(f"x{i}"))
    with pytest.raises(DnfBlowup):
        to_ground_dnf(phi, dm, {v: dm.domain(v) for v in dm.variables}, cap=1000)


def test_properties_small():
    assert guard_dnf_agreement(500, seed=10).ok
    assert guard_adm_restriction(300, seed=11).ok
    assert guard_roundtrip(300, seed=12).ok
