import random

import pytest

from dawnet.data_model import (AntisymmetryViolation, Assignment, DataError, DataModel, ValueOutsideDomain,
                               bind, same_value, unbind, validate_order)


def test_validate_order_closure():
    chain = [(i, i + 1) for i in range(5)]
    closed = validate_order(chain)
    strict = {(a, b) for a, b in closed if a != b}
    assert len(strict) == 15
    assert len(closed) == 21
    assert strict == {(i, j) for i in range(6) for j in range(6) if i < j}


def test_validate_order_antisymmetry():
    with pytest.raises(AntisymmetryViolation):
        validate_order({("a", "b"), ("b", "a")})
    with pytest.raises(AntisymmetryViolation):
        validate_order({("a", "b"), ("b", "c"), ("c", "a")})


def test_validate_order_reflexive_only():
    assert validate_order(set(), ["x"]) == {("x", "x")}


def test_values_of_different_tags_never_equal():
    assert not same_value(1, True)
    assert not same_value(0, False)
    assert not same_value("1", 1)
    assert same_value("a", "a")


def test_domain_may_not_mix_bool_and_int():
    with pytest.raises(DataError):
        DataModel.create({"x": [True, 1]})


def test_string_order():
    dm = DataModel.create({"lvl": ["lo", "mid", "hi"]}, {"lvl": [("lo", "mid"), ("mid", "hi")]})
    assert dm.leq("lo", "hi") and not dm.leq("hi", "lo")
    assert dm.is_ordered("lvl")
    assert not DataModel.create({"c": ["a", "b"]}).is_ordered("c")
    assert DataModel.create({"n": [3, 1]}).leq(1, 3)


def test_bind_unbind():
    dm = DataModel.create({"loanType": ["s", "w"], "x": [1, 2], "y": [2]})
    a = bind(Assignment(), "loanType", "w", dm)
    assert dict(a) == {"loanType": "w"}
    with pytest.raises(ValueOutsideDomain):
        bind(a, "loanType", "q", dm)
    b = bind(a, "loanType", "s", dm)
    assert b["loanType"] == "s" and a["loanType"] == "w"
    assert dict(unbind(Assignment({"x": 1}), "x")) == {}
    assert dict(unbind(Assignment(), "x")) == {}
    assert dict(unbind(Assignment({"x": 1, "y": 2}), "x")) == {"y": 2}


def test_bind_unbind_sequences_keep_values_in_domain():
    dm = DataModel.create({"x": [0, 1, 2], "y": ["a", "b"]})
    rng = random.Random(5)
    a = Assignment()
    for _ in range(500):
        v = rng.choice(dm.variables)
        if rng.random() < 0.3:
            a = unbind(a, v)
        else:
            a = bind(a, v, rng.choice(dm.domain(v)), dm)
        a.check(dm)


def test_order_lookups_transitive():
    dm = DataModel.create({"c": ["a", "b", "c", "d"]}, {"c": [("a", "b"), ("b", "c"), ("c", "d")]})
    order = dm.order_of("c")
    for a, b in order:
        for b2, c in order:
            if b == b2:
                assert (a, c) in order


def test_restrict():
    dm = DataModel.create({"x": [0, 1, 2, 3]})
    r = dm.restrict({"x": [1, 3, 99]})
    assert r.domain("x") == (1, 3)


def test_assignment_hash_respects_tags():
    assert Assignment({"x": 1}) != Assignment({"x": True})
    assert Assignment({"x": 1}) == Assignment({"x": 1})
