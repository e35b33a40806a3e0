import math
from fractions import Fraction

import pytest

from weightnorm.catalog import CATALOG_IDS, catalog_build
from weightnorm.expr import parse_weight_expr
from weightnorm.numeric import EXACT, LOG, LogScalar, ModeError
from weightnorm import numeric as nm
from weightnorm.semigroup import cayley, nat_add, nat_min, qpos_add
from weightnorm.weights import (RefusedQuery, Weight, check_submultiplicative, constant_weight,
                                is_subadditive, iterate_weight, spectral_radius_estimate,
                                tilde_bound, tilde_closed_form_check, tilde_value,
                                weight_from_expr)

from oracles import piecewise_tilde1_brute, piecewise_w


@pytest.fixture(scope="module")
def piecewise():
    return catalog_build("NMIN-PIECEWISE")


@pytest.fixture(scope="module")
def gauss():
    return catalog_build("NAT-GAUSS")


def test_weight_from_expr_picks_mode():
    assert weight_from_expr(parse_weight_expr("exp(0 - n)", nat_add())).mode == LOG
    assert weight_from_expr(parse_weight_expr("n + 1", nat_add())).mode == EXACT
    with pytest.raises(ModeError):
        weight_from_expr(parse_weight_expr("exp(n)", nat_add()), EXACT)


def test_piecewise_values_match_oracle(piecewise):
    assert [piecewise.weight(n) for n in range(1, 9)] == [piecewise_w(n) for n in range(1, 9)]
    assert piecewise.weight(4) == 2


def test_submultiplicative_examples(piecewise):
    assert check_submultiplicative(piecewise.weight, nat_min(), 6) == []
    assert check_submultiplicative(catalog_build("QPOS-DENOM").weight, qpos_add(), 5) == []
    half = lambda n: Fraction(1, 2) if n == 3 else Fraction(1)  # noqa: E731
    assert (3, 3) in check_submultiplicative(half, nat_min(), 3)


def test_tilde_bound_examples(piecewise, gauss):
    b = tilde_bound(piecewise.weight, piecewise.spec, 1, 1, 5)
    assert (b.lower, b.witness_t) == (4, 2)
    b = tilde_bound(piecewise.weight, piecewise.spec, 1, 3, 5)
    assert (b.lower, b.witness_t) == (32, 4) and b.exact_on_s and b.converged
    b = tilde_bound(gauss.weight, gauss.spec, 2, 3, 10)
    assert b.witness_t == 1 and b.converged
    assert b.lower.log == pytest.approx(-21.0, abs=1e-12)


def test_piecewise_tilde_table_matches_brute_force(piecewise):
    cf = piecewise.closed_form_tilde(1)
    for s in range(1, 30):
        assert cf(s) == piecewise_tilde1_brute(s)


def test_deeper_iterates_need_closed_forms():
    w = weight_from_expr(parse_weight_expr("n + 1", nat_add()))
    with pytest.raises(RefusedQuery):
        tilde_bound(w, nat_add(), 2, 1, 5)
    b = tilde_bound(w, nat_add(), 2, 1, 5, uncertified=True)
    assert not b.certified
    with pytest.raises(ValueError):
        tilde_bound(w, nat_add(), 0, 1, 5)


def test_uncertified_recursion_is_exact_on_finite_carriers():
    spec = cayley([[1, 1], [1, 2]])
    w = Weight("t", {1: Fraction(2), 2: Fraction(1)}.__getitem__)
    b = tilde_bound(w, spec, 2, 1, 1, uncertified=True)
    assert b.certified and b.exact_on_s


def test_tilde_value_sources(piecewise):
    assert tilde_value(piecewise.weight, piecewise.spec, 1, 3, 5) == 32
    w = weight_from_expr(parse_weight_expr("n + 1", nat_add()))
    assert tilde_value(w, nat_add(), 1, 1, 5) is None  # no tail hook, so no certified value


def test_closed_form_check_examples(gauss):
    rep = tilde_closed_form_check(gauss.weight, gauss.spec, 1, 10, range(1, 11))
    assert rep.ok and rep.all_converged
    c = constant_weight(1)
    rep = tilde_closed_form_check(c, nat_add(), 1, 10, range(1, 11))
    assert rep.ok and all(r.closed == 1 for r in rep.rows)
    d = catalog_build("QPOS-DENOM")
    rep = tilde_closed_form_check(d.weight, d.spec, 1, 7, [Fraction(2, 3)])
    assert rep.ok and rep.rows[0].lower == 3
    b = tilde_bound(d.weight, d.spec, 1, Fraction(2, 3), 7)
    assert Fraction(1, 5) in b.witnesses
    w = weight_from_expr(parse_weight_expr("n + 1", nat_add()))
    with pytest.raises(RefusedQuery):
        tilde_closed_form_check(w, nat_add(), 1, 5, [1])


def test_spectral_radius_examples(gauss):
    two = weight_from_expr(parse_weight_expr("pow(2, n)", nat_add()))
    est = spectral_radius_estimate(two, nat_add(), 0, 1, 20)
    assert all(v == pytest.approx(math.log(2)) for v in est.running_min_trace)
    est0 = spectral_radius_estimate(gauss.weight, gauss.spec, 0, 1, 20)
    assert est0.running_min == pytest.approx(-20.0)
    est1 = spectral_radius_estimate(gauss.weight, gauss.spec, 1, 1, 20)
    assert abs(est1.running_min - est0.running_min) <= 2 + 1e-12
    with pytest.raises(ValueError):
        spectral_radius_estimate(gauss.weight, gauss.spec, 0, 1, 1)


def test_spectral_radius_exact_overflow_advice():
    huge = weight_from_expr(parse_weight_expr("pow(2, pow(2, n))", nat_add()))
    with pytest.raises((ModeError, OverflowError, ValueError)):
        spectral_radius_estimate(huge, nat_add(), 0, 30, 5)


# properties over the catalog -----------------------------------------------


def _entries():
    return [catalog_build(i) for i in CATALOG_IDS]


@pytest.mark.parametrize("id", CATALOG_IDS)
def test_window_bound_monotone_and_below_closed_form(id):
    e = catalog_build(id)
    top = 12 if e.spec.kind == "fraction" else 20
    for s in e.spec.window(3):
        prev = None
        for m in range(1, top + 1):
            b = tilde_bound(e.weight, e.spec, 1, s, m)
            if prev is not None:
                assert nm.le(prev, b.lower, 0.0 if nm.is_exact(prev) else 1e-12)
            assert nm.le(b.lower, e.closed_form_tilde(1)(s))
            prev = b.lower


@pytest.mark.parametrize("id", CATALOG_IDS)
def test_first_iterate_is_a_weight(id):
    e = catalog_build(id)
    assert check_submultiplicative(e.closed_form_tilde(1), e.spec, 12) == []
    assert check_submultiplicative(e.weight, e.spec, 12) == []


@pytest.mark.parametrize("id", CATALOG_IDS)
def test_pointwise_descent(id):
    e = catalog_build(id)
    for s in e.spec.window(12):
        w0, w1, w2, w3 = (e.closed_form_tilde(k)(s) for k in range(4))
        assert nm.le(w3, w2) and nm.le(w2, w1) and nm.le(w1, w0)


@pytest.mark.parametrize("id", CATALOG_IDS)
def test_running_min_non_increasing(id):
    e = catalog_build(id)
    for k in (0, 1):
        for s in e.spec.window(2):
            est = spectral_radius_estimate(e.weight.to_log(), e.spec, k, s, 30)
            trace = est.running_min_trace
            assert all(b <= a for a, b in zip(trace, trace[1:]))
            assert is_subadditive(est.log_sequence)


def test_iterate_weight_shifts(gauss):
    w2 = iterate_weight(gauss.weight, 2)
    assert w2(1).log == pytest.approx(-5.0)
    assert iterate_weight(w2, 1)(1).log == pytest.approx(-7.0)


def test_log_and_exact_agree_on_rational_weights(piecewise):
    lw = piecewise.weight.to_log()
    for n in range(1, 30):
        assert math.isclose(math.exp(lw(n).log - n), float(piecewise.weight(n)) / math.exp(n),
                            rel_tol=1e-9)
