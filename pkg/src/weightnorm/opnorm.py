"""Two-sided certified brackets for operator norms.

The lower bound sweeps normalized point masses ``delta_s / w(s)``: they are
the extreme points of the unit ball of ``l^1(S, w)``, so the supremum of
``||f * delta_s|| / w(s)`` over all of S *is* the operator norm of f, and
any window gives a lower bound.  Upper bounds come from the first iterated
weight, from the alpha construction attached to an F-property refutation,
and from the weighted norm itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence, Tuple

from . import numeric as nm
from .algebra import (FinSuppElement, convolve, delta, pointwise_norm, pointwise_product,
                      sup_norm, weighted_norm)
from .fproperty import REFUTED_CERTIFIED, FPropertyVerdict, fproperty_search
from .numeric import DEFAULT_TOL
from .semigroup import SemigroupSpec
from .weights import RefusedQuery, Weight, iterate_weight, tilde_value

TILDE_NORM = "tilde-norm"
ALPHA_BOUND = "alpha-bound"
MIN_OF_BOTH = "min-of-both"
WEIGHTED_NORM = "weighted-norm"

MAX_ALPHA_SET = 20


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class NormInterval:
    lower: object
    upper: object
    lower_witness: object
    upper_method: str
    exact: bool
    window_m: int
    upper_candidates: dict = field(default_factory=dict)
    alpha_bounds: Tuple = ()


@dataclass(frozen=True)
class AlphaBound:
    T: Tuple
    r: Fraction
    alpha: object
    valid: bool
    total: object = None  # sum of first-iterate values, i.e. ||sum delta_t||_{w~1}
    reason: str = ""


def _ratio(spec, w, f, s):
    return weighted_norm(convolve(spec, f, delta(s)), w) / w(s)


def opnorm_lower(spec: SemigroupSpec, w: Weight, f: FinSuppElement, m: int):
    """``(max over s in W(m) of ||f * delta_s|| / w(s), first maximising s)``."""
    if not len(f):
        raise ValueError("operator norm lower bound needs a nonzero element")
    best, arg = None, None
    for s in spec.window(m):
        q = _ratio(spec, w, f, s)
        if best is None or q > best:
            best, arg = q, s
    return best, arg


def opnorm_upper_tilde(f: FinSuppElement, w: Weight):
    """``||f||`` in the first iterated weight, an upper bound for ``||f||_op``."""
    if not w.has_closed_form(1):
        raise RefusedQuery(f"{w.id} has no closed-form first iterate; no certified upper bound")
    return weighted_norm(f, iterate_weight(w, 1))


def _alpha(values: Sequence, r: Fraction):
    """Max of ``sum a_i v_i`` over ``a_i in {r, 1}`` with at least one ``a_i = r``."""
    exact = all(nm.is_exact(v) for v in values)
    best = None
    for choice in product((r, Fraction(1)), repeat=len(values)):
        if all(a == 1 for a in choice):
            continue
        terms = [a * v for a, v in zip(choice, values)]
        total = sum(terms, Fraction(0)) if exact else nm.log_sum(terms)
        if best is None or total > best:
            best = total
    return best


def opnorm_alpha_upper(spec: SemigroupSpec, w: Weight, T: Sequence, r,
                       refutation: Optional[FPropertyVerdict], m: int = 12,
                       tol: float = DEFAULT_TOL) -> AlphaBound:
    """The alpha bound for ``g = sum of delta_t over T``.

    Valid only when ``refutation`` certifies that no s meets all the
    F-property inequalities for ``(T, r)`` anywhere in S.
    """
    T = tuple(T)
    r = Fraction(r)
    if len(T) > MAX_ALPHA_SET:
        raise ValueError(f"alpha enumeration is limited to {MAX_ALPHA_SET} elements")
    values = [tilde_value(w, spec, 1, t, m, tol) for t in T]
    if any(v is None for v in values):
        return AlphaBound(T, r, None, False, reason="first iterate not certified on T")
    total = sum(values, Fraction(0)) if all(nm.is_exact(v) for v in values) \
        else nm.log_sum(values)
    alpha = _alpha(values, r)
    if refutation is None or refutation.status != REFUTED_CERTIFIED:
        return AlphaBound(T, r, alpha, False, total, "refutation missing or not certified")
    if tuple(refutation.T) != T or Fraction(refutation.r) != r or refutation.k != 0:
        return AlphaBound(T, r, alpha, False, total, "refutation is for a different query")
    return AlphaBound(T, r, alpha, True, total)


def refine_alpha(spec: SemigroupSpec, w: Weight, T: Sequence, r, m: int, steps: int = 10, *,
                 tail: bool = True, tol: float = DEFAULT_TOL) -> AlphaBound:
    """Bisect r toward the refutation boundary; alpha grows with r.

    Starts from a certified refutation at ``r`` and keeps the smallest r
    still refuted.
    """
    r = Fraction(r)
    v = fproperty_search(spec, w, T, r, m, tail=tail, tol=tol)
    best = opnorm_alpha_upper(spec, w, T, r, v, m, tol)
    if not best.valid:
        return best
    lo, hi = Fraction(0), r
    for _ in range(steps):
        mid = (lo + hi) / 2
        v = fproperty_search(spec, w, T, mid, m, tail=tail, tol=tol)
        if v.status == REFUTED_CERTIFIED:
            hi = mid
            best = opnorm_alpha_upper(spec, w, T, mid, v, m, tol)
        else:
            lo = mid
    return best


def opnorm_interval(spec: SemigroupSpec, w: Weight, f: FinSuppElement, m: int,
                    rs: Sequence = (), *, refine_steps: int = 0, tail: bool = True,
                    tol: float = DEFAULT_TOL) -> NormInterval:
    """Bracket ``||f||_op`` between the window sweep and the best certified upper bound.

    ``rs`` lists F-property thresholds to try for the alpha bound, which
    applies only when every coefficient of f is 1.  ``refine_steps > 0``
    bisects each r downward first.
    """
    lower, witness = opnorm_lower(spec, w, f, m)
    candidates = {WEIGHTED_NORM: weighted_norm(f, w)}
    if w.has_closed_form(1):
        candidates[TILDE_NORM] = opnorm_upper_tilde(f, w)
    alphas = []
    if rs and f.unit_coefficients:
        T = f.support
        for r in rs:
            if refine_steps:
                ab = refine_alpha(spec, w, T, r, m, refine_steps, tail=tail, tol=tol)
            else:
                v = fproperty_search(spec, w, T, r, m, tail=tail, tol=tol)
                ab = opnorm_alpha_upper(spec, w, T, r, v, m, tol)
            alphas.append(ab)
        valid = [a.alpha for a in alphas if a.valid]
        if valid:
            candidates[ALPHA_BOUND] = min(valid)

    upper = min(candidates.values())
    have_tilde = TILDE_NORM in candidates
    have_alpha = ALPHA_BOUND in candidates
    if have_tilde and have_alpha:
        method = MIN_OF_BOTH
    elif have_tilde:
        method = TILDE_NORM
    elif have_alpha:
        method = ALPHA_BOUND
    else:
        method = WEIGHTED_NORM
    exact = nm.rel_gap(lower, upper) <= tol
    return NormInterval(lower, upper, witness, method, exact, m, candidates, tuple(alphas))


@dataclass(frozen=True)
class DeltaCheck:
    t: object
    lower: object
    witness: object
    closed: object
    gap: float
    reached: bool
    window_needed: Optional[int]


def delta_opnorm_check(spec: SemigroupSpec, w: Weight, t, m: int,
                       tol: float = DEFAULT_TOL) -> DeltaCheck:
    """Compare the window sweep for ``delta_t`` with the closed-form first iterate."""
    cf = w.closed_form(1)
    if cf is None:
        raise RefusedQuery(f"{w.id} has no closed-form first iterate")
    closed = cf(t)
    f = delta(t)
    best, arg = None, None
    needed = None
    for s in spec.window(m):
        q = _ratio(spec, w, f, s)
        if best is None or q > best:
            best, arg = q, s
        if nm.close(q, closed, tol):
            idx = spec.entry_index(s)
            needed = idx if needed is None else min(needed, idx)
    gap = nm.rel_gap(best, closed)
    return DeltaCheck(t, best, arg, closed, gap, nm.close(best, closed, tol), needed)


@dataclass(frozen=True)
class PointwiseResult:
    value: object
    argmax: object
    probe: object
    probe_ok: bool


def pointwise_opnorm(X: Sequence, w, p, f: FinSuppElement) -> PointwiseResult:
    """Operator norm of f acting by pointwise product on ``l_p(X, w)``.

    It is ``||f||_inf``; the maximiser x is confirmed by the probe
    ``||f . delta_x / w(x)||_{p,w} = |f(x)|``.
    """
    if not 1 <= p < math.inf:
        raise DomainError("need 1 <= p < inf")
    members = set(X)
    for x in X:
        if not nm.ge(w(x), 1, 0.0):
            raise DomainError(f"weight below 1 at {x}")
    if any(x not in members for x in f):
        raise DomainError("support of f leaves the index set")
    value = sup_norm(f)
    if not len(f):
        return PointwiseResult(value, None, Fraction(0), True)
    x = next(s for s, c in f.items() if abs(c) == value)
    wx = w(x)
    inv = Fraction(1) / wx if nm.is_exact(wx) else 1 / nm.LogScalar.from_value(wx)
    unit = FinSuppElement({x: inv})
    probe = pointwise_norm(pointwise_product(f, unit), w, p)
    return PointwiseResult(value, x, probe, nm.close(probe, abs(f[x])))
