import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from weightnorm import numeric as nm
from weightnorm.numeric import LogScalar, log_sum


def test_from_value_round_trips_rationals():
    x = LogScalar.from_value(Fraction(3, 7))
    assert math.isclose(float(x), 3 / 7, rel_tol=1e-15)
    assert LogScalar.from_value(0).is_zero
    assert float(LogScalar.from_value(-2)) == pytest.approx(-2.0)


def test_huge_rationals_do_not_overflow():
    x = LogScalar.from_value(Fraction(4) ** 2000)
    assert x.log == pytest.approx(2000 * math.log(4))


def test_log_sum_factors_out_the_maximum():
    # e^-1000 underflows a double; the sum of two copies is 2 e^-1000
    s = log_sum([LogScalar.exp(-1000), LogScalar.exp(-1000)])
    assert s.log == pytest.approx(-1000 + math.log(2), abs=1e-12)


def test_log_sum_cancellation_and_empty():
    assert log_sum([LogScalar.exp(1.0), -LogScalar.exp(1.0)]).is_zero
    assert log_sum([]).is_zero


def test_complex_phase_arithmetic():
    z = LogScalar.from_value(complex(0, 2))
    assert not z.is_real
    w = z * z
    assert w.is_real and float(w) == pytest.approx(-4.0)


def test_comparisons_are_exact_for_rationals():
    assert nm.le(Fraction(1, 3), Fraction(1, 3), 0.0)
    assert not nm.lt(Fraction(1, 3), Fraction(1, 3))
    assert nm.lt(Fraction(1, 3), Fraction(1, 2))


def test_tolerant_comparisons_in_log_mode():
    a = LogScalar.exp(-5.0)
    b = LogScalar.exp(-5.0 + 1e-12)
    assert nm.close(a, b)
    assert not nm.lt(a, b)


def test_rel_gap():
    assert nm.rel_gap(Fraction(34), Fraction(851, 25)) == pytest.approx(0.04 / 34.04)
    assert nm.rel_gap(LogScalar.exp(-1.04), LogScalar.exp(-1.0)) == pytest.approx(
        1 - math.exp(-0.04))


def test_format_scalar():
    assert nm.format_scalar(Fraction(1, 2)) == "1/2"
    assert nm.format_scalar(34) == "34"
    out = nm.format_scalar(LogScalar.exp(-21))
    assert out["log"] == -21.0 and out["value"].startswith("7.58")
    assert nm.format_scalar(True) is True


def test_parse_fraction_rejects_garbage():
    assert nm.parse_fraction(" 51/100 ") == Fraction(51, 100)
    with pytest.raises(ValueError):
        nm.parse_fraction("1/0")
    with pytest.raises(ValueError):
        nm.parse_fraction("abc")


@given(st.fractions(min_value=Fraction(1, 10**6), max_value=10**6),
       st.fractions(min_value=Fraction(1, 10**6), max_value=10**6))
def test_exact_and_log_modes_agree(a, b):
    la, lb = LogScalar.from_value(a), LogScalar.from_value(b)
    assert math.isclose(float(la * lb), float(a * b), rel_tol=1e-9)
    assert math.isclose(float(la + lb), float(a + b), rel_tol=1e-9)
    assert math.isclose(float(la / lb), float(a / b), rel_tol=1e-9)
    assert (la < lb) == (a < b) or math.isclose(float(a), float(b), rel_tol=1e-12)
