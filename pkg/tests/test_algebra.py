import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from weightnorm.algebra import (ZERO, FinSuppElement, convolve, delta, normalized_delta,
                                parse_element, pointwise_norm, probe_faithful, random_element,
                                sup_norm, weighted_norm)
from weightnorm.catalog import CATALOG_IDS, catalog_build
from weightnorm.numeric import LogScalar, ModeError
from weightnorm import numeric as nm
from weightnorm.semigroup import nat_add, nat_min, qpos_add
from weightnorm.weights import constant_weight, iterate_weight


@pytest.fixture(scope="module")
def piecewise():
    return catalog_build("NMIN-PIECEWISE")


def test_delta():
    assert dict(delta(3)) == {3: 1}
    assert dict(delta(1) + delta(3)) == {1: 1, 3: 1}
    assert (delta(1) - delta(1)) == ZERO and len(ZERO) == 0


def test_delta_norm_is_the_weight(piecewise):
    for s in range(1, 8):
        assert weighted_norm(delta(s), piecewise.weight) == piecewise.weight(s)


def test_normalized_delta(piecewise):
    d = normalized_delta(4, piecewise.weight)
    assert dict(d) == {4: Fraction(1, 2)} and weighted_norm(d, piecewise.weight) == 1
    assert dict(normalized_delta(7, constant_weight(1))) == {7: 1}
    g = catalog_build("NAT-GAUSS").weight
    d = normalized_delta(3, g)
    assert d[3].log == pytest.approx(9.0)
    assert weighted_norm(d, g).log == pytest.approx(0.0, abs=1e-12)


def test_convolution_examples():
    spec = nat_min()
    f = delta(1) + delta(3)
    assert convolve(spec, delta(1), delta(3)) == delta(1)
    assert convolve(spec, f, delta(4)) == f
    assert convolve(spec, f, delta(2)) == delta(1) + delta(2)
    assert convolve(spec, f, ZERO) == ZERO


def test_convolution_accumulates_coinciding_products():
    f = delta(1) + delta(2)
    assert dict(convolve(nat_add(), f, f)) == {2: 1, 3: 2, 4: 1}
    assert dict(convolve(nat_min(), f, f)) == {1: 3, 2: 1}


def test_weighted_norm_examples(piecewise):
    f = delta(1) + delta(3)
    assert weighted_norm(f, piecewise.weight) == 68
    assert weighted_norm(f, iterate_weight(piecewise.weight, 1)) == 36
    assert weighted_norm(ZERO, piecewise.weight) == 0


def test_complex_coefficients_need_log_mode(piecewise):
    f = FinSuppElement({1: complex(3, 4)})
    with pytest.raises(ModeError):
        weighted_norm(f, piecewise.weight)
    assert float(weighted_norm(f, piecewise.weight.to_log())) == pytest.approx(20.0)


def test_sup_norm():
    assert sup_norm(FinSuppElement({1: Fraction(3), 2: Fraction(-5)})) == 5
    w = lambda k: Fraction(k)  # noqa: E731
    fn = FinSuppElement({k: 1 / w(k) for k in range(1, 20)})
    assert sup_norm(fn) == 1
    assert sup_norm(ZERO) == 0


def test_pointwise_norm_exact_roots():
    w = lambda k: Fraction(1)  # noqa: E731
    f = FinSuppElement({1: Fraction(3), 2: Fraction(4)})
    assert pointwise_norm(f, w, 2) == 5
    assert pointwise_norm(f, w, 1) == 7


def test_parse_element():
    assert parse_element("1:1,3:1", nat_min()) == delta(1) + delta(3)
    assert parse_element("1/2:3, 2", qpos_add()) == FinSuppElement(
        {Fraction(1, 2): Fraction(3), Fraction(2): Fraction(1)})
    assert parse_element("1:1+2j", nat_add())[1] == complex(1, 2)
    assert parse_element("2:1,2:1", nat_add()) == FinSuppElement({2: Fraction(2)})
    with pytest.raises(ValueError):
        parse_element("0:1", nat_add())
    with pytest.raises(ValueError):
        parse_element("1:x", nat_add())


def test_log_cleanup_drops_negligible_terms():
    f = FinSuppElement({1: LogScalar.exp(0.0), 2: LogScalar.exp(-200.0)})
    out = convolve(nat_add(), f, delta(1))
    assert out.support == (2,)


def test_log_cancellation_keeps_support_canonical():
    a = LogScalar.exp(0.5)
    f = FinSuppElement({1: a, 2: -a})
    assert convolve(nat_min(), f, delta(1)) == ZERO


@pytest.mark.parametrize("id", CATALOG_IDS)
def test_faithful(id):
    e = catalog_build(id)
    rng = random.Random(11)
    for _ in range(20):
        f = random_element(rng, e.spec, 6)
        assert probe_faithful(e.spec, f, 12) is not None


@pytest.mark.parametrize("id", CATALOG_IDS)
def test_banach_inequality_sample(id):
    e = catalog_build(id)
    w = e.weight
    rng = random.Random(5)
    for _ in range(60):
        f, g = random_element(rng, e.spec, 8), random_element(rng, e.spec, 8)
        assert nm.le(weighted_norm(convolve(e.spec, f, g), w),
                     weighted_norm(f, w) * weighted_norm(g, w))


@pytest.mark.parametrize("id", CATALOG_IDS)
def test_iterate_norms_decrease(id):
    e = catalog_build(id)
    rng = random.Random(9)
    w1, w2 = iterate_weight(e.weight, 1), iterate_weight(e.weight, 2)
    for _ in range(40):
        f = random_element(rng, e.spec, 8)
        a, b, c = weighted_norm(f, w2), weighted_norm(f, w1), weighted_norm(f, e.weight)
        assert nm.le(a, b) and nm.le(b, c)


_coeff = st.fractions(min_value=-5, max_value=5, max_denominator=4)
_elem = st.dictionaries(st.integers(1, 8), _coeff, max_size=4).map(FinSuppElement)


@settings(max_examples=60, deadline=None)
@given(_elem, _elem, _elem)
def test_convolution_is_associative_and_bilinear(f, g, h):
    for spec in (nat_add(), nat_min()):
        assert convolve(spec, convolve(spec, f, g), h) == convolve(spec, f, convolve(spec, g, h))
        assert convolve(spec, f + g, h) == convolve(spec, f, h) + convolve(spec, g, h)


@settings(max_examples=60, deadline=None)
@given(_elem)
def test_norm_is_homogeneous(f):
    w = catalog_build("NMIN-PIECEWISE").weight
    assert weighted_norm(f.scale(Fraction(-3, 2)), w) == Fraction(3, 2) * weighted_norm(f, w)
