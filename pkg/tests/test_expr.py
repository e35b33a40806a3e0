import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from weightnorm.expr import WeightEvalError, WeightSyntaxError, parse_weight_expr
from weightnorm.numeric import EXACT, LOG, ModeError
from weightnorm.semigroup import nat_add, nat_min, qpos_add


def test_gaussian_weight():
    e = parse_weight_expr("exp(0 - n*n)", nat_add())
    assert e.uses_exp
    assert e.evaluate(3, LOG).log == pytest.approx(-9.0)
    # far below double range, still representable
    assert e.evaluate(40, LOG).log == pytest.approx(-1600.0)


def test_denominator_weight():
    e = parse_weight_expr("den", qpos_add())
    assert e.evaluate(Fraction(7, 10), EXACT) == 10
    assert e.evaluate(Fraction(4, 2), EXACT) == 1


def test_piecewise_overrides():
    e = parse_weight_expr("pow(4, n)", nat_min(), {2: 1, 4: 2})
    assert [e.evaluate(n) for n in range(1, 6)] == [4, 1, 64, 2, 1024]
    e2 = parse_weight_expr("pow(4, n)", nat_min(), {"2": "1", "4": "2"})
    assert e2 == e


def test_precedence():
    e = parse_weight_expr("1 + 2 * n - 6 / 3", nat_add())
    assert e.evaluate(5) == 9
    assert parse_weight_expr("(1 + 2) * n", nat_add()).evaluate(5) == 15
    assert parse_weight_expr("2.5 * n", nat_add()).evaluate(2) == 5


def test_syntax_errors_carry_positions():
    with pytest.raises(WeightSyntaxError) as info:
        parse_weight_expr("1 + * n", nat_add())
    assert info.value.pos == 4
    for bad in ("", "exp(n", "pow(2)", "n n", "foo(n)", "1 $ 2"):
        with pytest.raises(WeightSyntaxError):
            parse_weight_expr(bad, nat_add())


def test_unknown_variable_for_kind():
    with pytest.raises(WeightSyntaxError):
        parse_weight_expr("num", nat_add())
    with pytest.raises(WeightSyntaxError):
        parse_weight_expr("n", qpos_add())


def test_positivity_and_division_errors():
    with pytest.raises(WeightEvalError):
        parse_weight_expr("n - 3", nat_add()).evaluate(2)
    with pytest.raises((WeightEvalError, ZeroDivisionError)):
        parse_weight_expr("1 / (n - 1)", nat_add()).evaluate(1)
    with pytest.raises(WeightEvalError):
        parse_weight_expr("n", nat_add(), {3: 0})


def test_exact_mode_refuses_exp():
    with pytest.raises(ModeError):
        parse_weight_expr("exp(n)", nat_add()).evaluate(1, EXACT)
    assert parse_weight_expr("exp(0)", nat_add()).evaluate(1, EXACT) == 1


def test_fractional_pow_needs_log_mode():
    e = parse_weight_expr("pow(n, 1/2)", nat_add())
    with pytest.raises(ModeError):
        e.evaluate(2, EXACT)
    assert float(e.evaluate(4, LOG)) == pytest.approx(2.0)


def test_constant_detection():
    assert parse_weight_expr("2", nat_add()).is_constant
    assert not parse_weight_expr("2", nat_add(), {1: 3}).is_constant
    assert not parse_weight_expr("n", nat_add()).is_constant


@given(st.integers(1, 60), st.integers(1, 5), st.integers(1, 5))
def test_exact_and_log_evaluation_agree(n, a, b):
    e = parse_weight_expr(f"pow({a}, n) * {b} + n / {b}", nat_add())
    exact = e.evaluate(n, EXACT)
    assert math.isclose(math.exp(e.evaluate(n, LOG).log), float(exact), rel_tol=1e-9)
