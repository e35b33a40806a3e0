import json
from fractions import Fraction

import pytest

from weightnorm.semigroup import (EncodingError, UnsupportedQuery, associativity_scan, cayley,
                                  compose, flag_status, get_semigroup, nat_add, nat_leftzero,
                                  nat_min, power, probe_associative, probe_order_compatibility,
                                  probe_right_cancellative, qpos_add)

from oracles import first_nonassociative_2x2

# frozen from oracles.first_nonassociative_2x2(): row-major lexicographic search
FIRST_NONASSOCIATIVE = [[1, 1], [2, 1]]
FIRST_NONASSOCIATIVE_WITNESS = (2, 1, 2)

FAMILIES = (nat_add, nat_min, nat_leftzero, qpos_add)


def test_compose_examples():
    assert compose(nat_min(), 2, 5) == 2
    assert compose(nat_leftzero(), 7, 3) == 7
    assert compose(qpos_add(), Fraction(1, 2), Fraction(1, 5)) == Fraction(7, 10)


def test_malformed_encodings():
    with pytest.raises(EncodingError):
        compose(nat_add(), 0, 1)
    with pytest.raises(EncodingError):
        compose(qpos_add(), Fraction(-1, 2), Fraction(1))
    with pytest.raises(EncodingError):
        nat_add().parse("1/2")


def test_power():
    assert power(nat_add(), 2, 3) == 6
    assert power(nat_min(), 3, 5) == 3
    assert power(nat_leftzero(), 4, 2) == 4
    assert power(nat_add(), 7, 1) == 7
    with pytest.raises(ValueError):
        power(nat_add(), 2, 0)


def test_windows():
    assert nat_add().window(4) == (1, 2, 3, 4)
    assert qpos_add().window(2) == (Fraction(1, 2), Fraction(1), Fraction(2))
    t = cayley([[1, 2, 3], [2, 2, 3], [3, 3, 3]])
    assert t.window(1) == t.window(7) == (1, 2, 3)
    with pytest.raises(ValueError):
        nat_add().window(0)


@pytest.mark.parametrize("make", FAMILIES)
def test_windows_are_monotone(make):
    spec = make()
    for m in range(1, 20):
        assert set(spec.window(m)) <= set(spec.window(m + 1))
        assert list(spec.window(m)) == sorted(spec.window(m))


def test_rational_window_is_reduced():
    for q in qpos_add().window(12):
        assert q.numerator >= 1 and q.denominator >= 1


def test_right_cancellativity_probe():
    assert probe_right_cancellative(nat_add(), 10) is None
    assert probe_right_cancellative(nat_min(), 3) == (2, 3, 1)
    assert probe_right_cancellative(nat_leftzero(), 5) is None
    assert probe_right_cancellative(qpos_add(), 8) is None
    for m in (3, 4, 6):
        assert probe_right_cancellative(nat_min(), m) is not None


def test_right_cancellativity_probe_at_twenty():
    assert probe_right_cancellative(nat_add(), 20) is None
    assert probe_right_cancellative(qpos_add(), 20) is None


def test_first_nonassociative_table_matches_brute_force():
    table, witness = first_nonassociative_2x2()
    assert table == FIRST_NONASSOCIATIVE and witness == FIRST_NONASSOCIATIVE_WITNESS


def test_associativity_probe():
    assert probe_associative(cayley([[1, 1], [1, 2]]), 1) is None
    assert probe_associative(cayley([[1, 2], [1, 2]]), 1) is None
    bad = probe_associative(cayley(FIRST_NONASSOCIATIVE), 1)
    assert bad == FIRST_NONASSOCIATIVE_WITNESS
    # (1 1) 1 = 1 (1 1) = 1 here; the first failing triple is (1,1,2): 2 2 = 1 but 1 1 = 2
    assert probe_associative(cayley([[2, 1], [1, 1]]), 1) == (1, 1, 2)


@pytest.mark.parametrize("make", FAMILIES)
def test_catalog_semigroups_are_associative(make):
    ce, untested = associativity_scan(make(), 12)
    assert ce is None
    if make is qpos_add:
        assert untested > 0


def test_order_compatibility():
    assert probe_order_compatibility(nat_add(), 10) is None
    assert probe_order_compatibility(nat_min(), 10) is None
    swap = cayley([[2, 1], [2, 1]], ordered=True)
    assert probe_order_compatibility(swap, 1) == (1, 2, 1)
    with pytest.raises(UnsupportedQuery):
        probe_order_compatibility(nat_leftzero(), 3)


def test_probes_are_deterministic():
    for make in FAMILIES:
        assert probe_right_cancellative(make(), 6) == probe_right_cancellative(make(), 6)


def test_flag_status_reports_declared_against_probed():
    st = flag_status(nat_min(), 4)
    assert st["right_cancellative"]["declared"] is True
    assert st["right_cancellative"]["counterexample"] == [2, 3, 1]
    assert "totally_ordered" not in flag_status(nat_leftzero(), 4)


def test_cayley_file(tmp_path):
    path = tmp_path / "t.json"
    path.write_text(json.dumps({"size": 2, "table": [[1, 1], [1, 2]], "ordered": True}))
    spec = get_semigroup(f"cayley:{path}")
    assert spec.finite and spec.compose(2, 2) == 2 and spec.ordered
    path.write_text(json.dumps({"size": 3, "table": [[1, 1], [1, 2]]}))
    with pytest.raises(ValueError):
        get_semigroup(f"cayley:{path}")
    with pytest.raises(ValueError):
        cayley([[1, 3], [1, 1]])
    with pytest.raises(KeyError):
        get_semigroup("nat-mul")


def test_distinct_tables_give_distinct_specs():
    assert cayley([[1, 1], [1, 1]]) != cayley([[1, 1], [1, 2]])
