from __future__ import annotations

import pytest

from contractcheck.errors import EncodeError
from contractcheck.terms import (Add, And, Const, Distinct, DivConst, Implies,
                                 IntIte, Mul, Not, Or, OwnerEq, ReplayEnv, Sub,
                                 Var, check_linear, conj, disj, entity_refs,
                                 eq, eval_bool, eval_int, ge, int_vars, le, lt,
                                 pretty)


def env(**ints) -> ReplayEnv:
    return ReplayEnv(ints)


def test_arithmetic_evaluation():
    term = Add(Mul(Const(3), Var("x")), Sub(Const(10), Var("y")))
    assert eval_int(term, env(x=4, y=2)) == 20


def test_division_is_floor_for_positive_divisor():
    # matches SMT-LIB semantics: (div a b) with b > 0 rounds toward -inf
    assert eval_int(DivConst(Const(7), 2), env()) == 3
    assert eval_int(DivConst(Const(-7), 2), env()) == -4


def test_ite_and_comparisons():
    term = IntIte(lt(Var("x"), Const(0)), Const(0), Var("x"))
    assert eval_int(term, env(x=-5)) == 0
    assert eval_int(term, env(x=5)) == 5


def test_boolean_connectives():
    term = Implies(ge(Var("x"), Const(0)), Or((eq(Var("x"), Const(1)),
                                               eq(Var("x"), Const(2)))))
    assert eval_bool(term, env(x=1))
    assert not eval_bool(term, env(x=3))
    assert eval_bool(term, env(x=-1))  # vacuous
    assert eval_bool(Not(eq(Var("x"), Const(0))), env(x=2))


def test_owner_equality_uses_model_values():
    e = ReplayEnv({}, owner_raw={"Bakery": "v2"},
                  person_values={"Bank": "v2", "Eva": "v0"})
    assert eval_bool(OwnerEq("Bakery", "Bank"), e)
    assert not eval_bool(OwnerEq("Bakery", "Eva"), e)


def test_distinct_over_model_values():
    e = ReplayEnv({}, person_values={"A": "v0", "B": "v0"})
    assert not eval_bool(Distinct("person", ("A", "B")), e)
    e2 = ReplayEnv({}, person_values={"A": "v0", "B": "v1"})
    assert eval_bool(Distinct("person", ("A", "B")), e2)


def test_missing_variable_is_an_error():
    with pytest.raises(EncodeError):
        eval_int(Var("ghost"), env())


def test_nonlinear_multiplication_rejected():
    with pytest.raises(EncodeError):
        check_linear(Mul(Var("x"), Var("y")))
    check_linear(Mul(Const(3), Var("x")))  # linear is fine


def test_var_collection():
    term = conj([eq(Var("a"), Const(1)), disj([lt(Var("b"), Var("c"))])])
    assert int_vars(term) == {"a", "b", "c"}


def test_entity_collection():
    term = And((OwnerEq("Bakery", "Bank"), Distinct("person", ("Bank", "Eva"))))
    objects, persons = entity_refs(term)
    assert objects == {"Bakery"}
    assert persons == {"Bank", "Eva"}


def test_conj_disj_simplify():
    assert conj([]) == conj([])  # true
    assert eval_bool(conj([]), env())
    assert not eval_bool(disj([]), env())
    single = eq(Var("x"), Const(1))
    assert conj([single]) is single
    assert disj([single]) is single


def test_pretty_renders_infix():
    text = pretty(Or((eq(Var("d"), Const(-1)),
                      And((le(Const(28), Var("d")), OwnerEq("Bakery", "Eva"))))))
    assert "d = -1" in text
    assert "owner(Bakery) = Eva" in text


def test_compensation_clamp_range_invariant():
    """For every raw damage value the clamped amount is 0 or within
    [minimum, maximum] — checked by brute force at desk scale."""
    minimum, maximum = 1000, 3000
    raw = Var("raw")
    clamp = IntIte(lt(raw, Const(minimum)), Const(0),
                   IntIte(lt(Const(maximum), raw), Const(maximum), raw))
    for value in range(-3 * minimum, 3 * maximum + 1):
        result = eval_int(clamp, env(raw=value))
        assert result == 0 or minimum <= result <= maximum
        if value >= minimum:  # once the damage reaches the minimum it is paid
            assert result == min(value, maximum)
