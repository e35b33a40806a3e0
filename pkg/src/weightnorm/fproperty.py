"""F-property searches, certificates and regularity verdicts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Tuple

from . import numeric as nm
from .numeric import DEFAULT_TOL
from .semigroup import SemigroupSpec, UnsupportedQuery, probe_order_compatibility
from .weights import Weight, tilde_bound

SATISFIED = "satisfied"
REFUTED_CERTIFIED = "refuted-certified"
REFUTED_ON_WINDOW = "refuted-on-window"
INCONCLUSIVE = "inconclusive"

REGULAR_CERTIFIED = "REGULAR_CERTIFIED"
NOT_REGULAR_CERTIFIED = "NOT_REGULAR_CERTIFIED"
UNKNOWN = "UNKNOWN"

INCREASING = "increasing"
DECREASING = "decreasing"


@dataclass(frozen=True)
class FPropertyQuery:
    T: Tuple
    r: Fraction
    m: int

    def __post_init__(self):
        if not self.T:
            raise ValueError("T must be non-empty")
        if not 0 < self.r < 1:
            raise ValueError("r must lie in (0, 1)")
        if self.m < 1:
            raise ValueError("window index must be >= 1")


@dataclass(frozen=True)
class FPropertyVerdict:
    status: str
    T: Tuple
    r: Fraction
    window_m: int
    k: int = 0
    witness: object = None
    ratio_sets: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    tilde_sources: dict = field(default_factory=dict)
    witness_ratios: dict = field(default_factory=dict)
    tail_note: str = ""

    @property
    def refuted(self) -> bool:
        return self.status == REFUTED_CERTIFIED


def _next_iterate(w: Weight, spec, k, t, m, tol):
    """Value of iterate k+1 at t and where it came from."""
    cf = w.closed_form(k + 1)
    if cf is not None:
        return cf(t), "closed-form"
    if k == 0:
        b = tilde_bound(w, spec, 1, t, m, tol=tol)
        return b.lower, "exact-on-S" if b.exact_on_s else "window-lower"
    return None, "unavailable"


def fproperty_search(spec: SemigroupSpec, w: Weight, T: Sequence, r, m: int, *,
                     k: int = 0, tail: bool = True, tol: float = DEFAULT_TOL) -> FPropertyVerdict:
    """Look for one ``s`` with ``w_k(t s) / w_k(s) >= r * w_{k+1}(t)`` for every t in T.

    ``>=`` is read literally.  A window miss becomes a certified refutation
    only on a finite carrier or when, for some t, the tail hook bounds every
    ratio outside the window strictly below the threshold.
    """
    r = Fraction(r)
    q = FPropertyQuery(tuple(T), r, m)
    T = tuple(spec.check(t) for t in q.T)
    base = w.closed_form(k)
    if base is None:
        raise UnsupportedQuery(f"{w.id} has no closed form for iterate {k}")

    thresholds, sources = {}, {}
    for t in T:
        value, src = _next_iterate(w, spec, k, t, m, tol)
        if value is None:
            return FPropertyVerdict(INCONCLUSIVE, T, r, m, k, tilde_sources={t: src},
                                    tail_note=f"iterate {k + 1} unavailable at {t}")
        thresholds[t] = r * value
        sources[t] = src
    certified_thresholds = all(src != "window-lower" for src in sources.values())

    win = spec.window(m)

    def ratio(t, s):
        return base(spec.rule(t, s)) / base(s)

    sets = {t: tuple(s for s in win if nm.ge(ratio(t, s), thresholds[t], tol)) for t in T}
    common = set(sets[T[0]])
    for t in T[1:]:
        common &= set(sets[t])
    candidates = [s for s in win if s in common]

    note = ""
    if not candidates and w.fproperty_witness is not None and k == 0:
        s = w.fproperty_witness(T)
        if all(nm.ge(ratio(t, s), thresholds[t], tol) for t in T):
            candidates = [s]
            note = "witness from the weight's constructive hook"

    if candidates:
        s = candidates[0]
        # re-verify independently of the set construction
        ratios = {t: base(spec.rule(t, s)) / base(s) for t in T}
        if not all(nm.ge(ratios[t], thresholds[t], tol) for t in T):
            raise RuntimeError(f"witness {s} failed re-verification")
        status = SATISFIED if certified_thresholds else INCONCLUSIVE
        return FPropertyVerdict(status, T, r, m, k, s, sets, thresholds, sources, ratios, note)

    if not certified_thresholds:
        return FPropertyVerdict(REFUTED_ON_WINDOW, T, r, m, k, None, sets, thresholds, sources,
                                tail_note="thresholds use window lower bounds; not conclusive")
    if spec.is_exhaustive(m):
        return FPropertyVerdict(REFUTED_CERTIFIED, T, r, m, k, None, sets, thresholds, sources,
                                tail_note="window is the whole carrier")
    if tail and k == 0:
        used = []
        for t in T:
            bound = w.tail(t, m)
            if bound is not None and nm.lt(bound, thresholds[t], tol):
                used.append(f"t={t}: ratios outside W({m}) <= {nm.display(bound)} "
                            f"< {nm.display(thresholds[t])}")
        if used:
            return FPropertyVerdict(REFUTED_CERTIFIED, T, r, m, k, None, sets, thresholds,
                                    sources, tail_note="; ".join(used))
    return FPropertyVerdict(REFUTED_ON_WINDOW, T, r, m, k, None, sets, thresholds, sources,
                            tail_note="no tail certificate applied; window-relative only")


# monotone and limsup certificates ---------------------------------------------


@dataclass(frozen=True)
class MonotoneCertificate:
    direction: str
    checked_window: int
    T: Tuple
    violations: Tuple

    @property
    def clean(self) -> bool:
        return not self.violations


@lru_cache(maxsize=64)
def _order_clean(spec: SemigroupSpec, m: int) -> bool:
    return probe_order_compatibility(spec, m) is None


def monotone_eta_certificate(spec: SemigroupSpec, w, T: Sequence, m: int, direction: str,
                             tol: float = DEFAULT_TOL) -> MonotoneCertificate:
    """Check that ``s -> w(t s) / w(s)`` is monotone on W(m) for every t in T.

    A clean certificate gives the F-property for every finite subset of T
    and every r: take the largest (increasing) or smallest (decreasing) of
    the individual near-maximisers.
    """
    if direction not in (INCREASING, DECREASING):
        raise ValueError(f"direction must be {INCREASING!r} or {DECREASING!r}")
    if not spec.ordered:
        raise UnsupportedQuery(f"{spec.id} carries no order")
    if not _order_clean(spec, m):
        raise UnsupportedQuery(f"order of {spec.id} is not compatible on W({m})")
    f = w.func if isinstance(w, Weight) else w
    win = spec.window(m)
    bad = []
    for t in T:
        eta = [f(spec.rule(t, s)) / f(s) for s in win]
        for j in range(len(win) - 1):
            a, b = eta[j], eta[j + 1]
            ok = nm.le(a, b, tol) if direction == INCREASING else nm.ge(a, b, tol)
            if not ok:
                bad.append((t, win[j], win[j + 1]))
    return MonotoneCertificate(direction, m, tuple(T), tuple(bad))


def _primes_upto(n: int):
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, int(n ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p::p] = bytearray(len(sieve[p * p::p]))
    return [p for p in range(2, n + 1) if sieve[p]]


@dataclass(frozen=True)
class LimsupReport:
    s: object
    target: object
    points: Tuple  # (t, ratio)
    running_max: Tuple
    reached: bool
    best_gap: float
    rate: Optional[float]


def limsup_certificate(spec: SemigroupSpec, w: Weight, s, K: int, *,
                       sequence: str = "reciprocal", tol: float = DEFAULT_TOL) -> LimsupReport:
    """Evaluate ``w(s + t) / w(t)`` along ``t -> 0+`` and compare with ``w(s)``.

    ``sequence="reciprocal"`` uses ``t = 1/k`` for ``k = 1..K``;
    ``"prime-reciprocal"`` uses ``t = 1/p`` for primes ``den(s) < p <= K``.
    This is numerical evidence for ``w~1(s) = w(s)``, not a proof.
    """
    if spec.id != "qpos-add":
        raise UnsupportedQuery("limsup evidence needs the positive rationals under addition")
    s = spec.check(Fraction(s))
    if sequence == "reciprocal":
        ts = [Fraction(1, k) for k in range(1, K + 1)]
    elif sequence == "prime-reciprocal":
        ts = [Fraction(1, p) for p in _primes_upto(K) if p > s.denominator]
    else:
        raise ValueError(f"unknown sequence {sequence!r}")
    target = w(s)
    points, trace = [], []
    best = None
    for t in ts:
        q = w(s + t) / w(t)
        points.append((t, q))
        if best is None or q > best:
            best = q
        trace.append(best)
    if best is None:
        raise ValueError("empty sequence")
    gap = nm.rel_gap(best, target)
    rate = _fit_rate(points, target)
    return LimsupReport(s, target, tuple(points), tuple(trace), nm.close(best, target, tol),
                        gap, rate)


def _fit_rate(points, target) -> Optional[float]:
    """Least-squares slope of ``log gap`` against ``log t``."""
    xs, ys = [], []
    for t, q in points:
        g = nm.rel_gap(q, target)
        if g > 0:
            xs.append(math.log(float(t)))
            ys.append(math.log(g))
    if len(xs) < 2:
        return None
    mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
    sxx = sum((x - mx) ** 2 for x in xs)
    if sxx == 0:
        return None
    return sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx


# regularity -----------------------------------------------------------------


@dataclass(frozen=True)
class RegularityVerdict:
    status: str
    evidence: Tuple[str, ...]
    gap_witness: object = None


def _finite_fproperty(spec, w, tol) -> Optional[object]:
    """On a finite carrier: an s attaining every sup at once, else None."""
    carrier = spec.window(1)
    tilde = {t: tilde_bound(w, spec, 1, t, 1, tol=tol).lower for t in carrier}
    for s in carrier:
        if all(nm.close(w(spec.rule(t, s)) / w(s), tilde[t], tol) for t in carrier):
            return s
    return None


def regularity_verdict(spec: SemigroupSpec, w: Weight, m: int = 12,
                       tol: float = DEFAULT_TOL) -> RegularityVerdict:
    """Decide whether the weighted norm equals its own operator norm.

    REGULAR_CERTIFIED needs the closed form of the first iterate to equal
    the weight and an F-property certificate; NOT_REGULAR_CERTIFIED needs an
    element where the closed-form iterate is strictly below the weight.
    """
    cf1 = w.closed_form(1)
    evidence = []
    if cf1 is None:
        if not spec.finite:
            return RegularityVerdict(UNKNOWN, ("no closed form for the first iterate",))
        cf1 = lambda t: tilde_bound(w, spec, 1, t, 1, tol=tol).lower  # noqa: E731
        evidence.append("first iterate computed exhaustively on the finite carrier")
    for t in spec.window(m):
        if nm.lt(cf1(t), w(t), tol):
            evidence.append(
                f"gap at t={t}: iterate {nm.display(cf1(t))} < weight {nm.display(w(t))}, so "
                f"||delta_t||_op <= {nm.display(cf1(t))} < ||delta_t||")
            return RegularityVerdict(NOT_REGULAR_CERTIFIED, tuple(evidence), t)
    evidence.append(f"first iterate equals the weight on W({m})")

    leg = None
    if w.constant:
        leg = "constant weight: every ratio equals the first iterate"
    elif w.fproperty_witness is not None:
        T = spec.window(min(m, 6))
        s = w.fproperty_witness(T)
        if all(nm.ge(w(spec.rule(t, s)) / w(s), cf1(t), tol) for t in T):
            leg = f"constructive witness s={s} meets every inequality for T=W({min(m, 6)}) at r=1"
    elif spec.finite:
        s = _finite_fproperty(spec, w, tol)
        if s is not None:
            leg = f"s={s} attains every supremum on the finite carrier"
    elif spec.ordered:
        T = spec.window(m)
        for direction in (DECREASING, INCREASING):
            try:
                cert = monotone_eta_certificate(spec, w, T, m, direction, tol)
            except UnsupportedQuery:
                break
            if cert.clean:
                leg = f"eta_t is {direction} on W({m}) for every t in W({m})"
                break
    if leg is None:
        evidence.append("no F-property certificate available")
        return RegularityVerdict(UNKNOWN, tuple(evidence))
    evidence.append(leg)
    return RegularityVerdict(REGULAR_CERTIFIED, tuple(evidence))
