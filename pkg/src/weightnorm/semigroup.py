"""Computable semigroups with monotone enumeration windows.

Elements are encoded as positive ``int`` (discrete families and Cayley
tables, 1-based) or as :class:`fractions.Fraction` (positive rationals,
always reduced).  Every family exposes ``window(m)``: a finite, sorted set
of elements with ``window(m) <= window(m + 1)`` whose union is all of S.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import gcd
from pathlib import Path
from typing import Callable, Optional, Sequence, Tuple

Element = object  # int | Fraction

COMMUTATIVE = "commutative"
RIGHT_CANCELLATIVE = "right_cancellative"
TOTALLY_ORDERED = "totally_ordered"

INT = "int"
FRACTION = "fraction"


class EncodingError(ValueError):
    """An element encoding that is not valid for the semigroup."""


class UnsupportedQuery(ValueError):
    """The query needs structure the semigroup does not carry."""


@dataclass(frozen=True)
class SemigroupSpec:
    id: str
    rule: Callable[[Element, Element], Element] = field(repr=False, compare=False)
    kind: str
    windower: Callable[[int], Tuple] = field(repr=False, compare=False)
    validator: Callable[[Element], bool] = field(repr=False, compare=False)
    entry_index: Callable[[Element], int] = field(repr=False, compare=False)
    ordered: bool = False
    declared_flags: frozenset = frozenset()
    size: Optional[int] = None  # finite carriers only
    table: Optional[Tuple] = None
    description: str = ""

    @property
    def finite(self) -> bool:
        return self.size is not None

    def check(self, a: Element) -> Element:
        if not self.validator(a):
            raise EncodingError(f"{a!r} is not an element of {self.id}")
        return a

    def compose(self, a: Element, b: Element) -> Element:
        return self.rule(self.check(a), self.check(b))

    def window(self, m: int) -> Tuple:
        if m < 1:
            raise ValueError("window index must be >= 1")
        return self.windower(m)

    def is_exhaustive(self, m: int) -> bool:
        """True when ``window(m)`` is all of S."""
        return self.finite and m >= 1

    def parse(self, text: str) -> Element:
        text = text.strip()
        try:
            value = Fraction(text) if self.kind == FRACTION else int(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise EncodingError(f"cannot parse element {text!r} for {self.id}") from exc
        return self.check(value)


def compose(spec: SemigroupSpec, a: Element, b: Element) -> Element:
    return spec.compose(a, b)


def power(spec: SemigroupSpec, s: Element, n: int) -> Element:
    """``s**n`` for ``n >= 1`` by repeated squaring."""
    if n < 1:
        raise ValueError("power needs n >= 1; a semigroup may lack an identity")
    spec.check(s)
    result = None
    base = s
    while n:
        if n & 1:
            result = base if result is None else spec.rule(result, base)
        n >>= 1
        if n:
            base = spec.rule(base, base)
    return result


def window(spec: SemigroupSpec, m: int) -> Tuple:
    return spec.window(m)


def format_element(a: Element) -> str:
    return str(a)


# families ------------------------------------------------------------------


def _is_pos_int(a) -> bool:
    return isinstance(a, int) and not isinstance(a, bool) and a >= 1


def _is_pos_fraction(a) -> bool:
    return isinstance(a, Fraction) and a > 0


@lru_cache(maxsize=None)
def _int_window(m: int) -> Tuple[int, ...]:
    return tuple(range(1, m + 1))


@lru_cache(maxsize=None)
def _rational_window(m: int) -> Tuple[Fraction, ...]:
    out = [Fraction(p, q) for p in range(1, m + 1) for q in range(1, m + 1) if gcd(p, q) == 1]
    out.sort()
    return tuple(out)


def _fraction_entry(a: Fraction) -> int:
    return max(a.numerator, a.denominator)


def nat_add() -> SemigroupSpec:
    return SemigroupSpec(
        id="nat-add",
        rule=lambda a, b: a + b,
        kind=INT,
        windower=_int_window,
        validator=_is_pos_int,
        entry_index=lambda a: a,
        ordered=True,
        declared_flags=frozenset({COMMUTATIVE, RIGHT_CANCELLATIVE, TOTALLY_ORDERED}),
        description="positive integers under addition",
    )


def nat_min() -> SemigroupSpec:
    # right cancellativity is the blanket assumption of the theory; probes refute it
    return SemigroupSpec(
        id="nat-min",
        rule=min,
        kind=INT,
        windower=_int_window,
        validator=_is_pos_int,
        entry_index=lambda a: a,
        ordered=True,
        declared_flags=frozenset({COMMUTATIVE, RIGHT_CANCELLATIVE, TOTALLY_ORDERED}),
        description="positive integers under m ^ n = min(m, n)",
    )


def nat_leftzero() -> SemigroupSpec:
    return SemigroupSpec(
        id="nat-leftzero",
        rule=lambda a, b: a,
        kind=INT,
        windower=_int_window,
        validator=_is_pos_int,
        entry_index=lambda a: a,
        ordered=False,
        declared_flags=frozenset(),
        description="positive integers under the left-zero law m . n = m",
    )


def qpos_add() -> SemigroupSpec:
    return SemigroupSpec(
        id="qpos-add",
        rule=lambda a, b: a + b,
        kind=FRACTION,
        windower=_rational_window,
        validator=_is_pos_fraction,
        entry_index=_fraction_entry,
        ordered=True,
        declared_flags=frozenset({COMMUTATIVE, RIGHT_CANCELLATIVE, TOTALLY_ORDERED}),
        description="positive rationals under addition",
    )


def cayley(table: Sequence[Sequence[int]], *, id: str = "cayley",
           ordered: bool = False, declared_flags=()) -> SemigroupSpec:
    """Finite semigroup from a 1-based multiplication table.

    ``table[a-1][b-1]`` is the product ``a * b``.  When ``ordered`` is set
    the natural order ``1 < 2 < ... < k`` is used.
    """
    k = len(table)
    if k == 0:
        raise ValueError("empty Cayley table")
    rows = tuple(tuple(int(x) for x in row) for row in table)
    for row in rows:
        if len(row) != k:
            raise ValueError("Cayley table must be square")
        for x in row:
            if not 1 <= x <= k:
                raise ValueError(f"table entry {x} outside 1..{k}")
    carrier = tuple(range(1, k + 1))
    return SemigroupSpec(
        id=id,
        rule=lambda a, b: rows[a - 1][b - 1],
        kind=INT,
        windower=lambda m: carrier,
        validator=lambda a: _is_pos_int(a) and a <= k,
        entry_index=lambda a: 1,
        ordered=ordered,
        declared_flags=frozenset(declared_flags),
        size=k,
        table=rows,
        description=f"finite semigroup of order {k} from a Cayley table",
    )


def load_cayley(path) -> SemigroupSpec:
    """Read ``{"size": k, "table": [[...]]}``; optional ``ordered`` and ``flags``."""
    data = json.loads(Path(path).read_text())
    table = data["table"]
    if int(data.get("size", len(table))) != len(table):
        raise ValueError("'size' does not match the table")
    return cayley(table, id=f"cayley:{path}", ordered=bool(data.get("ordered", False)),
                  declared_flags=data.get("flags", ()))


FAMILIES = {
    "nat-add": nat_add,
    "nat-min": nat_min,
    "nat-leftzero": nat_leftzero,
    "qpos-add": qpos_add,
}


def get_semigroup(selector: str) -> SemigroupSpec:
    if selector.startswith("cayley:"):
        return load_cayley(selector[len("cayley:"):])
    try:
        return FAMILIES[selector]()
    except KeyError:
        raise KeyError(f"unknown semigroup {selector!r}") from None


# probes --------------------------------------------------------------------


def probe_right_cancellative(spec: SemigroupSpec, m: int):
    """First ``(a, b, c)`` in W(m) with ``a != b`` and ``ac == bc``, else None.

    Triples with ``c`` distinct from ``a`` and ``b`` come first, then the
    degenerate ones; each group in lexicographic order.  Computed from the
    collision classes of ``a -> ac`` for each c, so the cost is O(|W|^2).
    """
    w = spec.window(m)
    best, deferred = None, None
    for c in w:
        classes = {}
        for a in w:
            classes.setdefault(spec.rule(a, c), []).append(a)
        for members in classes.values():
            if len(members) < 2:
                continue
            others = [x for x in members if x != c]
            if len(others) >= 2:
                cand = (others[0], others[1], c)
                if best is None or cand < best:
                    best = cand
            if c in members:
                cand = min((c, others[0], c), (others[0], c, c))
                if deferred is None or cand < deferred:
                    deferred = cand
    return best if best is not None else deferred


def associativity_scan(spec: SemigroupSpec, m: int):
    """Return ``(counterexample or None, untested)``.

    Triples whose intermediate products leave W(m) are skipped and counted.
    """
    w = spec.window(m)
    members = set(w)
    untested = 0
    for a, b, c in product(w, repeat=3):
        ab = spec.rule(a, b)
        bc = spec.rule(b, c)
        if not spec.finite and (ab not in members or bc not in members):
            untested += 1
            continue
        if spec.rule(ab, c) != spec.rule(a, bc):
            return (a, b, c), untested
    return None, untested


def probe_associative(spec: SemigroupSpec, m: int):
    return associativity_scan(spec, m)[0]


def probe_order_compatibility(spec: SemigroupSpec, m: int):
    """First ``(s, t, u)`` with ``s < t`` but ``us > ut`` or ``su > tu``.

    Only consecutive window elements are compared: by transitivity that
    covers every pair ``s < t`` inside W(m).
    """
    if not spec.ordered:
        raise UnsupportedQuery(f"{spec.id} carries no order")
    w = spec.window(m)
    for s, t in zip(w, w[1:]):
        for u in w:
            if spec.rule(u, s) > spec.rule(u, t) or spec.rule(s, u) > spec.rule(t, u):
                return (s, t, u)
    return None


def probe_commutative(spec: SemigroupSpec, m: int):
    w = spec.window(m)
    for a, b in product(w, repeat=2):
        if spec.rule(a, b) != spec.rule(b, a):
            return (a, b)
    return None


def flag_status(spec: SemigroupSpec, m: int) -> dict:
    """Declared flags next to what the window probes actually found."""
    rc = probe_right_cancellative(spec, m)
    comm = probe_commutative(spec, m)
    out = {
        RIGHT_CANCELLATIVE: {
            "declared": RIGHT_CANCELLATIVE in spec.declared_flags,
            "probe": "counterexample" if rc else "none-found",
            "counterexample": list(rc) if rc else None,
        },
        COMMUTATIVE: {
            "declared": COMMUTATIVE in spec.declared_flags,
            "probe": "counterexample" if comm else "none-found",
            "counterexample": list(comm) if comm else None,
        },
    }
    if spec.ordered:
        oc = probe_order_compatibility(spec, m)
        out[TOTALLY_ORDERED] = {
            "declared": TOTALLY_ORDERED in spec.declared_flags,
            "probe": "counterexample" if oc else "none-found",
            "counterexample": list(oc) if oc else None,
        }
    return out
