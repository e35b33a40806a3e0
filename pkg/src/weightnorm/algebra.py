"""Finitely supported elements of l^1(S, w), convolution and norms."""

from __future__ import annotations

import math
from collections.abc import Mapping
from fractions import Fraction
from typing import Iterable, Optional

from . import numeric as nm
from .numeric import EXACT, LogScalar, ModeError, log_sum
from .semigroup import SemigroupSpec

# log-mode coefficients this far below the largest one are dropped
CLEANUP_LOG_GAP = 45 * math.log(10)


def _is_zero(c) -> bool:
    if isinstance(c, LogScalar):
        return c.is_zero
    return c == 0


class FinSuppElement(Mapping):
    """A finite sum ``sum c_s delta_s``; zero coefficients are never stored.

    Coefficients are Fractions in exact work, or complex / LogScalar values.
    Iteration follows the canonical (ascending) element order.
    """

    __slots__ = ("_items", "_index")

    def __init__(self, coeffs: Optional[Mapping] = None):
        items = [(s, c) for s, c in (coeffs or {}).items() if not _is_zero(c)]
        items.sort(key=lambda kv: kv[0])
        self._items = tuple(items)
        self._index = dict(items)

    def __getitem__(self, s):
        return self._index[s]

    def __iter__(self):
        return (s for s, _ in self._items)

    def __len__(self):
        return len(self._items)

    @property
    def support(self):
        return tuple(s for s, _ in self._items)

    def get(self, s, default=0):
        return self._index.get(s, default)

    def __add__(self, other: "FinSuppElement") -> "FinSuppElement":
        out = dict(self._index)
        for s, c in other.items():
            out[s] = out[s] + c if s in out else c
        return FinSuppElement(out)

    def __neg__(self):
        return FinSuppElement({s: -c for s, c in self._items})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, a) -> "FinSuppElement":
        return FinSuppElement({s: a * c for s, c in self._items})

    def __eq__(self, other):
        if isinstance(other, FinSuppElement):
            return self._items == other._items
        return NotImplemented

    def __hash__(self):
        return hash(self._items)

    def __repr__(self):
        if not self._items:
            return "FinSuppElement(0)"
        return f"FinSuppElement({self.format()})"

    def format(self) -> str:
        return ",".join(f"{s}:{nm.display(c)}" for s, c in self._items)

    @property
    def unit_coefficients(self) -> bool:
        return bool(self._items) and all(c == 1 for _, c in self._items)


ZERO = FinSuppElement()


def delta(s) -> FinSuppElement:
    return FinSuppElement({s: Fraction(1)})


def normalized_delta(s, w) -> FinSuppElement:
    """``delta_s / w(s)``, a unit vector of the weighted norm."""
    ws = w(s)
    if nm.is_exact(ws):
        return FinSuppElement({s: Fraction(1) / ws})
    return FinSuppElement({s: LogScalar.from_value(1) / ws})


def parse_element(text: str, spec: SemigroupSpec) -> FinSuppElement:
    """Parse ``"1:1,3:1"`` (element:coefficient pairs; a bare element means 1)."""
    out = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            elem, coeff = part.split(":", 1)
            coeff = coeff.strip()
            c = complex(coeff) if "j" in coeff else nm.parse_fraction(coeff)
        else:
            elem, c = part, Fraction(1)
        s = spec.parse(elem)
        out[s] = out[s] + c if s in out else c
    if not out and text.strip() not in ("", "0"):
        raise ValueError(f"cannot parse element literal {text!r}")
    return FinSuppElement(out)


def _accumulate(terms: list):
    if any(isinstance(t, LogScalar) for t in terms):
        return log_sum(terms)
    total = terms[0]
    for t in terms[1:]:
        total = total + t
    return total


def convolve(spec: SemigroupSpec, f: FinSuppElement, g: FinSuppElement) -> FinSuppElement:
    """``(f * g)(x) = sum of f(u) g(v) over u v = x``, exactly over support pairs."""
    buckets = {}
    for u, a in f.items():
        for v, b in g.items():
            buckets.setdefault(spec.rule(u, v), []).append(a * b)
    out = {x: _accumulate(terms) for x, terms in buckets.items()}
    logs = [c.log for c in out.values() if isinstance(c, LogScalar) and not c.is_zero]
    if logs:
        floor = max(logs) - CLEANUP_LOG_GAP
        out = {x: c for x, c in out.items()
               if not (isinstance(c, LogScalar) and c.log < floor)}
    return FinSuppElement(out)


def _abs_exact(c):
    if isinstance(c, complex):
        if c.imag != 0:
            raise ModeError("complex coefficients need log mode")
        c = c.real
    if isinstance(c, float):
        raise ModeError("float coefficients need log mode")
    return abs(Fraction(c))


def weighted_norm(f: FinSuppElement, w) -> object:
    """``sum |f(s)| w(s)``; exact for rational coefficients and an exact weight."""
    mode = getattr(w, "mode", EXACT)
    coeffs = list(f.items())
    if mode == EXACT and all(not isinstance(c, LogScalar) for _, c in coeffs):
        if any(isinstance(c, complex) and c.imag != 0 for _, c in coeffs):
            raise ModeError("complex coefficients force log mode")
        total = Fraction(0)
        for s, c in coeffs:
            total += _abs_exact(c) * w(s)
        return total
    return log_sum(abs(LogScalar.from_value(c)) * LogScalar.from_value(w(s)) for s, c in coeffs)


def sup_norm(f: FinSuppElement):
    """Largest coefficient modulus; 0 for the zero element."""
    best = Fraction(0)
    for _, c in f.items():
        a = abs(c)
        if a > best:
            best = a
    return best


def pointwise_product(f: FinSuppElement, g: FinSuppElement) -> FinSuppElement:
    return FinSuppElement({x: c * g[x] for x, c in f.items() if x in g})


def _exact_root(x: Fraction, p: int) -> Optional[Fraction]:
    def iroot(n):
        try:
            r = round(n ** (1.0 / p))
        except OverflowError:
            return None
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand ** p == n:
                return cand
        return None

    a, b = iroot(x.numerator), iroot(x.denominator)
    if a is None or b is None:
        return None
    return Fraction(a, b)


def pointwise_norm(f: FinSuppElement, w, p=1):
    """``(sum (|f(x)| w(x))^p)^(1/p)`` for the pointwise-product algebra.

    Exact whenever the p-th root is rational; otherwise a float (exact
    weight) or LogScalar (log weight).
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    if p == 1:
        return weighted_norm(f, w)
    mode = getattr(w, "mode", EXACT)
    terms = [(x, c) for x, c in f.items()]
    if not terms:
        return Fraction(0)
    if mode == EXACT and isinstance(p, int) and all(
            not isinstance(c, (LogScalar, complex, float)) for _, c in terms):
        if len(terms) == 1:
            x, c = terms[0]
            return abs(Fraction(c)) * w(x)
        total = sum((abs(Fraction(c)) * w(x)) ** p for x, c in terms)
        root = _exact_root(total, p)
        return root if root is not None else float(total) ** (1.0 / p)
    acc = log_sum((abs(LogScalar.from_value(c)) * LogScalar.from_value(w(x))) ** p
                  for x, c in terms)
    return LogScalar(acc.log / p)


def probe_faithful(spec: SemigroupSpec, f: FinSuppElement, m: int):
    """First ``s`` in W(m) with ``f * delta_s != 0``, else None."""
    for s in spec.window(m):
        if len(convolve(spec, f, delta(s))):
            return s
    return None


def random_element(rng, spec: SemigroupSpec, m: int, max_terms: int = 4,
                   coeffs: Iterable = (-3, -2, -1, 1, 2, 3)) -> FinSuppElement:
    """A random nonzero element with support in W(m) and small integer coefficients."""
    win = spec.window(m)
    coeffs = tuple(coeffs)
    k = rng.randint(1, min(max_terms, len(win)))
    support = rng.sample(list(win), k)
    return FinSuppElement({s: Fraction(rng.choice(coeffs)) for s in support})
