"""Command-line entry point.

Exit codes: 0 success, 1 a verification row failed, 2 usage or
configuration error (diagnostic on stderr).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from . import numeric as nm
from .algebra import parse_element
from .catalog import CATALOG_IDS, catalog_build, verify_entry
from .expr import parse_weight_expr
from .fproperty import fproperty_search
from .opnorm import opnorm_interval
from .report import FORMATS, build_report, render, report_lines
from .semigroup import get_semigroup, probe_right_cancellative
from .weights import spectral_radius_estimate, tilde_bound, weight_from_expr

FLAG_PROBE_WINDOW = 6


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    system: str
    weight: Optional[str] = None
    mode: Optional[str] = None
    window: int = 12
    tol: float = nm.DEFAULT_TOL
    out: str = "json"
    overrides: Tuple[str, ...] = ()
    element: Optional[str] = None
    k: Optional[int] = None
    fprop_set: Optional[str] = None
    r: Tuple[str, ...] = ()
    N: int = 50
    tail: str = "auto"
    refine_steps: int = 0


def _parse_overrides(items, spec):
    out = {}
    for item in items:
        item = item.strip()
        if item.startswith("{"):
            try:
                pairs = json.loads(item).items()
            except (json.JSONDecodeError, AttributeError) as exc:
                raise ConfigError(f"bad override map {item!r}") from exc
        else:
            if "=" not in item:
                raise ConfigError(f"override must look like k=v, got {item!r}")
            pairs = [item.split("=", 1)]
        for k, v in pairs:
            out[spec.parse(str(k))] = nm.parse_fraction(str(v))
    return out


def resolve(cfg: RunConfig):
    """``(spec, weight, catalog entry or None)`` for a config."""
    if cfg.window < 1:
        raise ConfigError("--window must be >= 1")
    entry = None
    if cfg.system.startswith("id:"):
        entry = catalog_build(cfg.system[3:], cfg.mode)
        spec = entry.spec
    else:
        spec = get_semigroup(cfg.system)
    overrides = _parse_overrides(cfg.overrides, spec)
    sel = cfg.weight
    if sel is None:
        if entry is None:
            raise ConfigError("--weight is required unless --system names a catalog entry")
        if overrides:
            raise ConfigError("--override applies to expression weights only")
        return spec, entry.weight, entry
    if sel.startswith("expr:"):
        expr = parse_weight_expr(sel[5:], spec, overrides)
        return spec, weight_from_expr(expr, cfg.mode), entry
    if sel.startswith("id:"):
        other = catalog_build(sel[3:], cfg.mode)
        if other.spec.kind != spec.kind:
            raise ConfigError(f"weight {other.id} is defined on a different element type")
        return spec, other.weight, entry
    raise ConfigError("--weight must be expr:<src> or id:<catalog-id>")


def _flags(spec, entry):
    out = []
    ce = probe_right_cancellative(spec, FLAG_PROBE_WINDOW)
    if ce is not None:
        out.append("not-right-cancellative(" + ",".join(map(str, ce)) + ")")
    if entry is not None and entry.notes:
        out.append(f"discrepancy-notes:{len(entry.notes)}")
    return out


def _need(value, flag):
    if value is None:
        raise ConfigError(f"{flag} is required for this command")
    return value


def _parse_r(text) -> Fraction:
    r = nm.parse_fraction(text)
    if not 0 < r < 1:
        raise ConfigError("--r must lie strictly between 0 and 1")
    return r


def compute(cfg: RunConfig, what: str) -> dict:
    spec, w, entry = resolve(cfg)
    m = cfg.window
    head = {"system": cfg.system, "weight": w.id}
    if what == "tilde":
        s = spec.parse(_need(cfg.element, "--element"))
        k = 1 if cfg.k is None else cfg.k
        b = tilde_bound(w, spec, k, s, m, tol=cfg.tol)
        return {**head, "k": k, "element": s, "window": m, "lower": b.lower,
                "witness": b.witness_t, "witnesses": b.witnesses, "converged": b.converged,
                "closed_form": b.closed_form, "exact_on_S": b.exact_on_s,
                "certified": b.certified, "tail_bound": b.tail_bound,
                "flags": _flags(spec, entry)}
    if what == "opnorm":
        f = parse_element(_need(cfg.element, "--element"), spec)
        rs = tuple(_parse_r(r) for r in cfg.r)
        iv = opnorm_interval(spec, w, f, m, rs, refine_steps=cfg.refine_steps,
                             tail=cfg.tail == "auto", tol=cfg.tol)
        alphas = [{"r": a.r, "alpha": a.alpha, "valid": a.valid, "reason": a.reason}
                  for a in iv.alpha_bounds]
        return {**head, "element": f, "window": m, "lower": iv.lower,
                "lower_witness": iv.lower_witness, "upper": iv.upper,
                "upper_method": iv.upper_method, "exact": iv.exact,
                "flags": _flags(spec, entry), "upper_candidates": iv.upper_candidates,
                "alpha": alphas}
    if what == "fprop":
        T = [spec.parse(x) for x in _need(cfg.fprop_set, "--fprop-set").split(",") if x.strip()]
        if len(cfg.r) != 1:
            raise ConfigError("fprop takes exactly one --r")
        r = _parse_r(cfg.r[0])
        v = fproperty_search(spec, w, T, r, m, k=cfg.k or 0, tail=cfg.tail == "auto",
                             tol=cfg.tol)
        return {**head, "T": v.T, "r": v.r, "k": v.k, "window": m, "status": v.status,
                "witness": v.witness, "thresholds": v.thresholds,
                "threshold_sources": v.tilde_sources, "ratio_sets": v.ratio_sets,
                "tail_note": v.tail_note, "flags": _flags(spec, entry)}
    if what == "radius":
        s = spec.parse(_need(cfg.element, "--element"))
        k = cfg.k or 0
        est = spectral_radius_estimate(w, spec, k, s, cfg.N)
        return {**head, "k": k, "element": s, "N": cfg.N, "running_min": est.running_min,
                "value_at_N": est.value_at_N, "radius": est.radius,
                "log_sequence": list(est.log_sequence)}
    raise ConfigError(f"unknown quantity {what!r}")


def verify(target: str):
    ids = CATALOG_IDS if target == "all" else (target,)
    if target != "all" and target not in CATALOG_IDS:
        raise ConfigError(f"unknown catalog id {target!r}")
    rows, summary, ok = [], [], True
    for id in ids:
        _, results = verify_entry(id)
        passed = sum(r.passed for r in results)
        ok &= passed == len(results)
        summary.append(f"{id}: {passed}/{len(results)} rows pass")
        for r in results:
            rows.append({"entry": id, "quantity": r.row.quantity,
                         "status": "PASS" if r.passed else "FAIL", "measured": r.measured,
                         "expected": r.row.expected, "provenance": r.row.provenance})
    return {"target": target, "ok": ok, "lines": summary, "rows": rows}, ok


def _common(p):
    p.add_argument("--mode", choices=nm.MODES, default=None)
    p.add_argument("--window", type=int, default=12, metavar="M")
    p.add_argument("--tol", type=float, default=nm.DEFAULT_TOL, metavar="T")
    p.add_argument("--out", choices=FORMATS, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weightnorm",
                                     description="Weighted semigroup algebra toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("compute", help="compute one quantity")
    pc.add_argument("what", choices=("tilde", "opnorm", "fprop", "radius"))
    _common(pc)
    pc.add_argument("--system", required=True, help="id:<catalog-id>, a family or cayley:<path>")
    pc.add_argument("--weight", help="expr:<src> or id:<catalog-id>")
    pc.add_argument("--override", action="append", default=[], metavar="K=V")
    pc.add_argument("--element")
    pc.add_argument("--k", type=int)
    pc.add_argument("--fprop-set", dest="fprop_set")
    pc.add_argument("--r", action="append", default=[])
    pc.add_argument("--N", type=int, default=50)
    pc.add_argument("--tail", choices=("auto", "none"), default="auto")
    pc.add_argument("--refine-steps", dest="refine_steps", type=int, default=0)

    pv = sub.add_parser("verify", help="check a catalog entry's expected values")
    pv.add_argument("target", help="catalog id or 'all'")
    _common(pv)

    pr = sub.add_parser("report", help="claims report with discrepancy annotations")
    _common(pr)

    pk = sub.add_parser("catalog", help="catalog commands")
    pk.add_argument("action", choices=("list",))
    _common(pk)
    return parser


def _emit(text: str):
    sys.stdout.write(text + "\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "compute":
            cfg = RunConfig(system=args.system, weight=args.weight, mode=args.mode,
                            window=args.window, tol=args.tol, out=args.out or "json",
                            overrides=tuple(args.override), element=args.element, k=args.k,
                            fprop_set=args.fprop_set, r=tuple(args.r), N=args.N,
                            tail=args.tail, refine_steps=args.refine_steps)
            _emit(render(compute(cfg, args.what), cfg.out))
            return 0
        if args.command == "verify":
            data, ok = verify(args.target)
            out = args.out or "table"
            if out == "table":
                lines = list(data["lines"])
                if args.target != "all":
                    lines = [f"{r['status']}  {r['quantity']}  measured={nm.display(r['measured'])}"
                             f"  expected={nm.display(r['expected'])}  [{r['provenance']}]"
                             for r in data["rows"]] + lines
                _emit("\n".join(lines))
            else:
                _emit(render(data, out))
            return 0 if ok else 1
        if args.command == "report":
            rep = build_report()
            out = args.out or "table"
            _emit("\n".join(report_lines(rep)) if out == "table" else
                  render({"rows": rep["claims"]} if out == "csv" else rep, out))
            return 0
        if args.command == "catalog":
            rows = []
            for id in CATALOG_IDS:
                e = catalog_build(id)
                rows.append({"id": id, "description": e.description,
                             "discrepancies": len(e.notes)})
            out = args.out or "table"
            if out == "table":
                _emit("\n".join(f"{r['id']:<16} {r['description']}"
                                + (f"  [{r['discrepancies']} discrepancy notes]"
                                   if r["discrepancies"] else "") for r in rows))
            else:
                _emit(render({"rows": rows}, out))
            return 0
    except (ValueError, KeyError, OSError, ArithmeticError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"weightnorm: error: {msg}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
