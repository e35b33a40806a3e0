"""Scalar arithmetic in two modes.

Exact mode uses :class:`fractions.Fraction` throughout.  Log mode stores a
number as ``phase * exp(log)`` so that weights such as ``exp(-n*n)`` stay
representable long after a double would underflow.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Iterable

EXACT = "exact"
LOG = "log"
MODES = (EXACT, LOG)

DEFAULT_TOL = 1e-9


class ModeError(ValueError):
    """Raised when a value cannot be represented in the requested mode."""


class LogScalar:
    """A real or complex number held as ``phase * exp(log)``.

    ``phase`` is a unit complex number (exactly ``1`` or ``-1`` for reals).
    Zero is ``log == -inf``.
    """

    __slots__ = ("log", "phase")

    def __init__(self, log: float, phase: complex = 1.0):
        if math.isnan(log):
            raise ValueError("NaN log-magnitude")
        if log == -math.inf:
            phase = 1.0
        elif isinstance(phase, complex) and phase.imag == 0.0:
            phase = 1.0 if phase.real > 0 else -1.0
        self.log = float(log)
        self.phase = phase

    # construction -------------------------------------------------------

    @classmethod
    def from_value(cls, x) -> "LogScalar":
        if isinstance(x, LogScalar):
            return x
        if isinstance(x, complex):
            if x == 0:
                return ZERO_LOG
            r = abs(x)
            return cls(math.log(r), x / r)
        if isinstance(x, Fraction):
            if x == 0:
                return ZERO_LOG
            sign = 1.0 if x > 0 else -1.0
            a = abs(x)
            # math.log accepts arbitrarily large ints
            return cls(math.log(a.numerator) - math.log(a.denominator), sign)
        if isinstance(x, (int, float)):
            if x == 0:
                return ZERO_LOG
            return cls(math.log(abs(x)), 1.0 if x > 0 else -1.0)
        raise TypeError(f"cannot convert {type(x).__name__} to LogScalar")

    @classmethod
    def exp(cls, x: float) -> "LogScalar":
        return cls(float(x), 1.0)

    # predicates ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.log == -math.inf

    @property
    def is_real(self) -> bool:
        return not isinstance(self.phase, complex)

    # arithmetic ---------------------------------------------------------

    def __neg__(self):
        return LogScalar(self.log, -self.phase)

    def __abs__(self):
        return LogScalar(self.log, 1.0)

    def __mul__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        if self.is_zero or o.is_zero:
            return ZERO_LOG
        return LogScalar(self.log + o.log, _mul_phase(self.phase, o.phase))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        if o.is_zero:
            raise ZeroDivisionError("LogScalar division by zero")
        if self.is_zero:
            return ZERO_LOG
        return LogScalar(self.log - o.log, _div_phase(self.phase, o.phase))

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __add__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return log_sum((self, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return log_sum((self, -o))

    def __rsub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return log_sum((o, -self))

    def __pow__(self, k):
        if not isinstance(k, int):
            if self.is_real and self.phase > 0:
                return LogScalar(self.log * float(k), 1.0)
            raise ValueError("non-integer power of a non-positive LogScalar")
        if k == 0:
            return ONE_LOG
        if self.is_zero:
            if k < 0:
                raise ZeroDivisionError("zero to a negative power")
            return ZERO_LOG
        phase = self.phase ** k
        if not isinstance(phase, complex):
            phase = 1.0 if phase > 0 else -1.0
        return LogScalar(self.log * k, phase)

    # conversion / comparison ---------------------------------------------

    def __float__(self):
        if not self.is_real:
            raise TypeError("complex LogScalar has no float value")
        if self.is_zero:
            return 0.0
        return self.phase * math.exp(self.log)

    def __complex__(self):
        if self.is_zero:
            return 0j
        return complex(self.phase) * math.exp(self.log)

    def _key(self):
        # real ordering: sign first, then magnitude (reversed for negatives)
        if not self.is_real:
            raise TypeError("complex LogScalar values are unordered")
        if self.is_zero:
            return (0, 0.0)
        if self.phase > 0:
            return (1, self.log)
        return (-1, -self.log)

    def _cmp(self, other, op):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return op(self._key(), o._key())

    def __lt__(self, other):
        return self._cmp(other, lambda a, b: a < b)

    def __le__(self, other):
        return self._cmp(other, lambda a, b: a <= b)

    def __gt__(self, other):
        return self._cmp(other, lambda a, b: a > b)

    def __ge__(self, other):
        return self._cmp(other, lambda a, b: a >= b)

    def __eq__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return False
        return self.log == o.log and self.phase == o.phase

    def __hash__(self):
        return hash((self.log, self.phase))

    def __repr__(self):
        if self.is_zero:
            return "LogScalar(0)"
        if self.is_real:
            sign = "" if self.phase > 0 else "-"
            return f"LogScalar({sign}exp({self.log!r}))"
        return f"LogScalar(exp({self.log!r}) * {self.phase!r})"


ZERO_LOG = LogScalar(-math.inf)
ONE_LOG = LogScalar(0.0)


def _coerce(x):
    if isinstance(x, LogScalar):
        return x
    if isinstance(x, (int, float, complex, Fraction)):
        return LogScalar.from_value(x)
    return NotImplemented


def _mul_phase(a, b):
    p = a * b
    if isinstance(p, complex):
        r = abs(p)
        return p / r if r else 1.0
    return p


def _div_phase(a, b):
    p = a / b
    if isinstance(p, complex):
        r = abs(p)
        return p / r if r else 1.0
    return p


def log_sum(terms: Iterable) -> LogScalar:
    """Sum log-domain values, factoring out the largest magnitude first."""
    items = [LogScalar.from_value(t) for t in terms]
    items = [t for t in items if not t.is_zero]
    if not items:
        return ZERO_LOG
    top = max(t.log for t in items)
    if all(t.is_real for t in items):
        acc = math.fsum(t.phase * math.exp(t.log - top) for t in items)
        if acc == 0.0:
            return ZERO_LOG
        return LogScalar(top + math.log(abs(acc)), 1.0 if acc > 0 else -1.0)
    acc = sum(complex(t.phase) * cmath.exp(t.log - top) for t in items)
    if acc == 0:
        return ZERO_LOG
    r = abs(acc)
    return LogScalar(top + math.log(r), acc / r)


# mode helpers --------------------------------------------------------------


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def to_mode(x, mode: str):
    if mode == LOG:
        return LogScalar.from_value(x)
    if is_exact(x):
        return Fraction(x)
    raise ModeError(f"value {x!r} is not an exact rational")


def log_of(x) -> float:
    """Natural log of a positive scalar in either mode."""
    v = LogScalar.from_value(x)
    if not v.is_real or v.phase < 0 or v.is_zero:
        raise ValueError(f"log of non-positive value {x!r}")
    return v.log


def _both_exact(a, b) -> bool:
    return is_exact(a) and is_exact(b)


def le(a, b, tol: float = DEFAULT_TOL) -> bool:
    """``a <= b``, exactly for rationals and up to relative ``tol`` otherwise."""
    if _both_exact(a, b):
        return a <= b
    la, lb = LogScalar.from_value(a), LogScalar.from_value(b)
    if la.is_zero or lb.is_zero or la.phase < 0 or lb.phase < 0:
        return la <= lb
    return la.log <= lb.log + math.log1p(tol)


def ge(a, b, tol: float = DEFAULT_TOL) -> bool:
    return le(b, a, tol)


def lt(a, b, tol: float = DEFAULT_TOL) -> bool:
    """Certified strict ``a < b``: strictness must exceed the tolerance."""
    return not le(b, a, tol)


def close(a, b, tol: float = DEFAULT_TOL) -> bool:
    return le(a, b, tol) and le(b, a, tol)


def rel_gap(lower, upper) -> float:
    """``(upper - lower) / upper`` as a float, for reporting."""
    if _both_exact(lower, upper):
        if upper == 0:
            return 0.0
        return float((Fraction(upper) - Fraction(lower)) / Fraction(upper))
    lo, up = LogScalar.from_value(lower), LogScalar.from_value(upper)
    if up.is_zero:
        return 0.0
    if lo.is_zero:
        return 1.0
    return -math.expm1(lo.log - up.log)


def parse_fraction(text: str) -> Fraction:
    text = text.strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc


def format_scalar(x):
    """JSON-friendly rendering: exact values as rational strings."""
    if isinstance(x, bool) or x is None:
        return x
    if is_exact(x):
        return str(Fraction(x))
    if isinstance(x, LogScalar):
        if not x.is_real:
            return {"log": x.log, "phase": [x.phase.real, x.phase.imag]}
        out = {"log": x.log, "value": f"{float(x):.12g}" if x.log < 700 else f"exp({x.log!r})"}
        if x.phase < 0:
            out["sign"] = -1
        return out
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return str(x)


def display(x) -> str:
    """Short human-readable rendering for tables."""
    if is_exact(x):
        return str(Fraction(x))
    if isinstance(x, LogScalar):
        if x.is_zero:
            return "0"
        if x.is_real and -700 < x.log < 700:
            return f"{float(x):.12g}"
        return f"exp({x.log:.12g})"
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return str(x)
