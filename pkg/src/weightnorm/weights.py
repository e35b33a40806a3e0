"""Weights, iterated weights and their window-certified bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple

from . import numeric as nm
from .expr import WeightExpr
from .numeric import DEFAULT_TOL, EXACT, LOG, LogScalar, ModeError
from .semigroup import SemigroupSpec, power


class RefusedQuery(ValueError):
    """The requested quantity would not be a certified bound."""


@dataclass(frozen=True, eq=False)
class Weight:
    """A positive function on a semigroup plus optional analytic hooks.

    ``tilde_rule(k, s)`` gives the closed form of the k-th iterated weight
    for ``1 <= k <= tilde_max_k`` (``None`` meaning every k).
    ``ratio_tail_bound(a, m)`` bounds ``sup w(a x) / w(x)`` over ``x``
    outside ``window(m)``, or returns None when it has nothing to say.
    ``fproperty_witness(T)`` proposes an element meeting every F-property
    inequality for ``T`` at any ``r < 1``; callers re-verify it.
    """

    id: str
    func: Callable = field(repr=False)
    mode: str = EXACT
    tilde_rule: Optional[Callable] = field(default=None, repr=False)
    tilde_max_k: Optional[int] = None
    ratio_tail_bound: Optional[Callable] = field(default=None, repr=False)
    fproperty_witness: Optional[Callable] = field(default=None, repr=False)
    constant: bool = False
    expr: Optional[WeightExpr] = field(default=None, repr=False)

    def __post_init__(self):
        if self.mode not in nm.MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        object.__setattr__(self, "func", lru_cache(maxsize=None)(self.func))

    def __call__(self, s):
        return self.func(s)

    def has_closed_form(self, k: int) -> bool:
        if k == 0:
            return True
        return self.tilde_rule is not None and (self.tilde_max_k is None or k <= self.tilde_max_k)

    def closed_form(self, k: int) -> Optional[Callable]:
        """The k-th iterated weight as a function, or None if unknown."""
        if k == 0:
            return self.func
        if not self.has_closed_form(k):
            return None
        rule = self.tilde_rule
        return lambda s: rule(k, s)

    def tail(self, a, m: int):
        if self.ratio_tail_bound is None:
            return None
        return self.ratio_tail_bound(a, m)

    def to_log(self) -> "Weight":
        if self.mode == LOG:
            return self
        conv = LogScalar.from_value
        func = self.func
        rule = self.tilde_rule
        tail = self.ratio_tail_bound

        def tail_log(a, m):
            v = tail(a, m)
            return None if v is None else conv(v)

        return Weight(
            id=self.id,
            func=lambda s: conv(func(s)),
            mode=LOG,
            tilde_rule=None if rule is None else (lambda k, s: conv(rule(k, s))),
            tilde_max_k=self.tilde_max_k,
            ratio_tail_bound=None if tail is None else tail_log,
            fproperty_witness=self.fproperty_witness,
            constant=self.constant,
            expr=self.expr,
        )


def weight_from_expr(expr: WeightExpr, mode: Optional[str] = None, *, id: Optional[str] = None,
                     **hooks) -> Weight:
    """Wrap a parsed expression; ``mode=None`` picks log iff it uses ``exp``."""
    if mode is None:
        mode = LOG if expr.uses_exp else EXACT
    if mode == EXACT and expr.uses_exp:
        # surfaces the error now rather than on first evaluation
        raise ModeError(f"{expr.src!r} uses exp and cannot be evaluated exactly; use log mode")
    return Weight(
        id=id or f"expr:{expr.src}",
        func=lambda s: expr.evaluate(s, mode),
        mode=mode,
        constant=expr.is_constant,
        expr=expr,
        **hooks,
    )


def constant_weight(value=1, mode: str = EXACT, id: Optional[str] = None) -> Weight:
    v = nm.to_mode(Fraction(value), mode)
    return Weight(
        id=id or f"const:{value}",
        func=lambda s: v,
        mode=mode,
        tilde_rule=lambda k, s: nm.to_mode(Fraction(1), mode),
        ratio_tail_bound=lambda a, m: nm.to_mode(Fraction(1), mode),
        constant=True,
    )


def iterate_weight(w: Weight, k: int) -> Weight:
    """The closed-form k-th iterate as a weight in its own right."""
    if k == 0:
        return w
    if not w.has_closed_form(k):
        raise RefusedQuery(f"{w.id} has no closed form for iterate {k}")
    rule = w.tilde_rule
    return Weight(
        id=f"{w.id}~{k}",
        func=lambda s: rule(k, s),
        mode=w.mode,
        tilde_rule=lambda j, s: rule(j + k, s),
        tilde_max_k=None if w.tilde_max_k is None else w.tilde_max_k - k,
        constant=w.constant,
    )


def _as_func(w):
    return w.func if isinstance(w, Weight) else w


# submultiplicativity --------------------------------------------------------


def check_submultiplicative(w, spec: SemigroupSpec, m: int, tol: float = DEFAULT_TOL):
    """All ``(s, t)`` in W(m)^2 with ``w(st) > w(s) w(t)`` beyond tolerance."""
    f = _as_func(w)
    win = spec.window(m)
    out = []
    for s in win:
        ws = f(s)
        for t in win:
            if not nm.le(f(spec.rule(s, t)), ws * f(t), tol):
                out.append((s, t))
    return out


# iterated weights -----------------------------------------------------------


@dataclass(frozen=True)
class IteratedWeightBound:
    k: int
    s: object
    lower: object
    witness_t: object
    window_m: int
    converged: Optional[bool] = None
    closed_form: object = None
    exact_on_s: bool = False
    certified: bool = True
    witnesses: Tuple = ()
    tail_bound: object = None


def _window_max(ratio, win, tol):
    best = None
    arg = None
    values = []
    for t in win:
        r = ratio(t)
        values.append((t, r))
        if best is None or r > best:
            best, arg = r, t
    if nm.is_exact(best):
        ties = tuple(t for t, r in values if r == best)
    else:
        ties = tuple(t for t, r in values if nm.close(r, best, tol))
    return best, arg, ties


def tilde_bound(w: Weight, spec: SemigroupSpec, k: int, s, m: int, *,
                uncertified: bool = False, tol: float = DEFAULT_TOL) -> IteratedWeightBound:
    """Lower bound for the k-th iterated weight at ``s`` from the window W(m).

    The maximum of ``base(s t) / base(t)`` over ``t`` in W(m), where ``base``
    is the (k-1)-th iterate.  For ``k >= 2`` that iterate must be a closed
    form unless ``uncertified`` is set, because a window maximum of ratios of
    lower bounds bounds nothing.
    """
    if k < 1:
        raise ValueError("iteration depth must be >= 1")
    spec.check(s)
    certified = True
    base = w.closed_form(k - 1)
    if base is None:
        if not uncertified:
            raise RefusedQuery(
                f"no closed form for iterate {k - 1} of {w.id}; pass uncertified=True to recurse")
        # a finite carrier makes every window supremum exact
        certified = spec.is_exhaustive(m)
        cache = {}

        def base(x):
            if x not in cache:
                cache[x] = tilde_bound(w, spec, k - 1, x, m, uncertified=True, tol=tol).lower
            return cache[x]

    def ratio(t):
        return base(spec.rule(s, t)) / base(t)

    lower, witness, ties = _window_max(ratio, spec.window(m), tol)

    closed = None
    converged = None
    if w.has_closed_form(k):
        closed = w.closed_form(k)(s)
        converged = nm.close(lower, closed, tol)

    exact = False
    tail = None
    if certified and spec.is_exhaustive(m):
        exact = True
    elif certified and k == 1:
        tail = w.tail(s, m)
        if tail is not None and nm.le(tail, lower, 0.0 if nm.is_exact(tail) else tol):
            exact = True
    return IteratedWeightBound(k, s, lower, witness, m, converged, closed, exact, certified,
                               ties, tail)


def tilde_value(w: Weight, spec: SemigroupSpec, k: int, s, m: int, tol: float = DEFAULT_TOL):
    """A certified value of the k-th iterate at ``s`` or None.

    Closed forms win; otherwise a window bound that the tail hook (or a
    finite carrier) shows to be the supremum over all of S.
    """
    cf = w.closed_form(k)
    if cf is not None:
        return cf(s)
    if k == 1:
        b = tilde_bound(w, spec, 1, s, m, tol=tol)
        if b.exact_on_s:
            return b.lower
    return None


@dataclass(frozen=True)
class ClosedFormRow:
    s: object
    lower: object
    closed: object
    below: bool
    converged: bool
    witness_t: object


@dataclass(frozen=True)
class ClosedFormReport:
    k: int
    window_m: int
    rows: Tuple[ClosedFormRow, ...]
    submultiplicative_violations: Tuple
    descent_violations: Tuple

    @property
    def all_below(self) -> bool:
        return all(r.below for r in self.rows)

    @property
    def all_converged(self) -> bool:
        return all(r.converged for r in self.rows)

    @property
    def ok(self) -> bool:
        return self.all_below and not self.submultiplicative_violations \
            and not self.descent_violations


def tilde_closed_form_check(w: Weight, spec: SemigroupSpec, k: int, m: int,
                            elements: Sequence, tol: float = DEFAULT_TOL, *,
                            invariant_m: Optional[int] = None) -> ClosedFormReport:
    """Compare a closed-form iterate with its window bounds and the chain order.

    Submultiplicativity and descent are checked on W(invariant_m), default
    W(m): iterate k+1 (when known) below iterate k, which is below the
    weight itself.
    """
    im = m if invariant_m is None else invariant_m
    if k < 1 or not w.has_closed_form(k):
        raise RefusedQuery(f"{w.id} has no closed form for iterate {k}")
    cf = w.closed_form(k)
    rows = []
    for s in elements:
        b = tilde_bound(w, spec, k, s, m, tol=tol)
        rows.append(ClosedFormRow(s, b.lower, b.closed_form, nm.le(b.lower, b.closed_form, tol),
                                  bool(b.converged), b.witness_t))
    submult = check_submultiplicative(cf, spec, im, tol)
    descent = []
    nxt = w.closed_form(k + 1)
    prev = w.closed_form(k - 1)
    for s in spec.window(im):
        v = cf(s)
        if nxt is not None and not nm.le(nxt(s), v, tol):
            descent.append((s, f"iterate {k + 1} above iterate {k}"))
        if not nm.le(v, prev(s), tol):
            descent.append((s, f"iterate {k} above iterate {k - 1}"))
        if not nm.le(v, w(s), tol):
            descent.append((s, f"iterate {k} above the weight"))
    return ClosedFormReport(k, m, tuple(rows), tuple(submult), tuple(descent))


# spectral radius ------------------------------------------------------------


@dataclass(frozen=True)
class SpectralRadiusEstimate:
    s: object
    k: int
    log_sequence: Tuple[float, ...]
    running_min_trace: Tuple[float, ...]

    @property
    def running_min(self) -> float:
        return self.running_min_trace[-1]

    @property
    def value_at_N(self) -> float:
        n = len(self.log_sequence)
        return self.log_sequence[-1] / n

    @property
    def radius(self) -> float:
        """Current estimate of ``lim w(s^n)^(1/n)``."""
        return math.exp(self.running_min)


def spectral_radius_estimate(w: Weight, spec: SemigroupSpec, k: int, s, N: int
                             ) -> SpectralRadiusEstimate:
    """``a_n = log w_k(s^n)`` for ``n = 1..N`` and the running min of ``a_n / n``.

    The sequence is subadditive, so the running min decreases to the log of
    the limit.
    """
    if N < 2:
        raise ValueError("need N >= 2")
    base = w.closed_form(k)
    if base is None:
        raise RefusedQuery(f"{w.id} has no closed form for iterate {k}")
    logs = []
    trace = []
    best = math.inf
    for n in range(1, N + 1):
        x = power(spec, s, n)
        try:
            a = nm.log_of(base(x))
        except ModeError as exc:
            raise ModeError(f"{exc}; rerun with --mode log") from exc
        logs.append(a)
        best = min(best, a / n)
        trace.append(best)
    return SpectralRadiusEstimate(s, k, tuple(logs), tuple(trace))


def is_subadditive(seq: Sequence[float], tol: float = 1e-9) -> bool:
    n = len(seq)
    for i in range(1, n + 1):
        for j in range(1, n + 1 - i):
            if seq[i + j - 1] > seq[i - 1] + seq[j - 1] + tol * (1 + abs(seq[i + j - 1])):
                return False
    return True
