"""Command-line front end.

Results go to stdout as one JSON document (or CSV); progress goes to stderr.
Failures print {"error": {...}} and exit with status 2.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import time
from fractions import Fraction

import mpmath

from . import bessel, moments, spectral, systole, volumes
from .bessel import LengthWindow

log = logging.getLogger("wpsphere")


def _render(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else str(v.numerator)
    if isinstance(v, mpmath.mpf):
        return mpmath.nstr(v, 30)
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(v, dict):
        return {str(k): _render(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_render(x) for x in v]
    return v


def _flatten(d, prefix=""):
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = ";".join(str(x) for x in v)
        else:
            out[key] = v
    return out


def emit(doc, fmt: str, out=None):
    out = out or sys.stdout
    doc = _render(doc)
    if fmt == "json":
        out.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
        return
    rows = doc.get("rows") if isinstance(doc, dict) else None
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if rows:
        flat = [_flatten(r) for r in rows]
        cols = list(flat[0].keys())
        w.writerow(cols)
        for r in flat:
            w.writerow([repr(r[c]) if isinstance(r[c], float) else r[c] for c in cols])
    else:
        w.writerow(["key", "value"])
        for k, v in sorted(_flatten(doc).items()):
            w.writerow([k, repr(v) if isinstance(v, float) else v])
    out.write(buf.getvalue())


def _ints(text: str) -> list:
    return [int(t) for t in text.split(",") if t.strip()]


def _floats(text: str) -> list:
    return [float(t) for t in text.split(",") if t.strip()]


def _table(args):
    t0 = time.perf_counter()
    log.info("loading volume table (n_exact=%d, n_float=%d, %d digits)", args.n_exact, args.n_float, args.precision)
    table = volumes.get_table(args.n_exact, args.n_float, args.precision, cache=args.cache, build=not args.no_build)
    log.info("volume table ready in %.2fs", time.perf_counter() - t0)
    return table


def _config(args) -> dict:
    return {
        "precision_digits": args.precision,
        "n_exact": args.n_exact,
        "n_float": args.n_float,
        "c_max": args.c_max,
    }


def cmd_constants(args):
    table = _table(args)
    c = bessel.bessel_constants(args.precision)
    w = LengthWindow(args.a, args.b)
    a_iv = moments.alpha_partial_with_tail(100, table)
    b0 = table.B0_estimate
    return {
        "j0": c.j0,
        "J1_at_j0": c.J1_at_j0,
        "J2_at_j0": c.J2_at_j0,
        "J3_at_j0": c.J3_at_j0,
        "x0": c.x0,
        "alpha_closed": float(c.alpha),
        "alpha_series_interval": a_iv.as_dict(),
        "window": {"a": w.a, "b": w.b},
        "lambda_window": float(bessel.lambda_window(w, args.precision)),
        "mp_intensity": float(bessel.mp_intensity(w.a, w.b)),
        "systole_limit": float(bessel.systole_limit_constant(args.precision)),
        "systole_limit_quadrature": systole.expected_systole_limit(float(c.alpha)),
        "B0_estimate": b0.as_dict(),
        "B0_singularity": volumes.B0_from_singularity(args.precision),
    }


def cmd_volumes(args):
    table = _table(args)
    ns = [args.n] if args.n_max is None else list(range(3, args.n_max + 1))
    rows = []
    for n in ns:
        if n < 3:
            raise ValueError("n must be >= 3")
        v = table.volume(n)
        rows.append(
            {
                "n": n,
                "tier": "exact" if n in table.exact else ("float" if n in table.floats else "asymptotic"),
                "value": v,
                "s_n": float(table.s_scaled(n)),
            }
        )
    return {"rows": rows}


def cmd_alpha(args):
    table = _table(args)
    iv = moments.alpha_partial_with_tail(args.n_terms, table)
    return {
        "n_terms": args.n_terms,
        "partial_sum": moments.alpha_partial_sum(args.n_terms, table),
        "interval": iv.as_dict(),
        "alpha_closed": float(bessel.alpha_closed()),
        "contains_alpha_closed": iv.contains(bessel.alpha_closed()),
    }


def cmd_moments(args):
    table = _table(args)
    w = LengthWindow(args.a, args.b)
    rows = moments.convergence_report(args.k, w, _ints(args.n_schedule), args.c_max, table)
    return {"k": args.k, "window": {"a": w.a, "b": w.b}, "rows": rows}


def cmd_poisson(args):
    table = _table(args)
    w = LengthWindow(args.a, args.b)
    lam = float(bessel.lambda_window(w))
    rows = moments.poisson_compare(args.k_max, w, args.n, args.c_max, table)
    for r in rows:
        r["pmf_at_k"] = moments.poisson_pmf(lam, r["k"])
    return {"lambda": lam, "n": args.n, "rows": rows}


def cmd_systole(args):
    table = _table(args)
    rows = []
    for c in _floats(args.c):
        rep = systole.systole_tail_bound(args.n, c, table)
        d = rep.as_dict()
        d["bound_times_c2"] = rep.tail_probability_upper * c * c
        rows.append(d)
    return {
        "n": args.n,
        "schmutz_bound": systole.schmutz_bound(args.n),
        "crude_log_bound": systole.crude_log_bound(args.n),
        "rows": rows,
    }


def cmd_spectral(args):
    table = _table(args)
    doc = {
        "k": args.k,
        "epsilon": args.eps,
        "delta": args.delta,
        "criterion_length": spectral.criterion_length(args.eps),
        "zk_collar_volume": spectral.zk_collar_volume(args.eps),
        "family_size": args.k + 1,
        "min_n": spectral.min_n_for_small_eigenvalues(args.k, args.eps, args.delta, table=table),
    }
    if args.n_schedule:
        doc["rows"] = [
            spectral.prob_no_k_family_details(n, args.k + 1, spectral.schedule_length(n, args.eps), table)
            for n in _ints(args.n_schedule)
        ]
    return doc


def cmd_build_cache(args):
    if not args.cache:
        raise ValueError(f"no cache path: pass --cache or set {volumes.CACHE_ENV}")
    table = volumes.build_volume_table(args.n_exact, args.n_float, args.precision)
    volumes.save_table(table, args.cache)
    return {"cache": str(args.cache), "entries": table.n_float - 2, **_config(args)}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wpsphere", description=__doc__.splitlines()[0], allow_abbrev=False)
    p.add_argument("--precision", type=int, default=50, help="working digits for the float volume tier")
    p.add_argument("--n-exact", type=int, default=64)
    p.add_argument("--n-float", type=int, default=400)
    p.add_argument("--c-max", type=int, default=200)
    p.add_argument("--cache", default=None, help=f"volume cache file (default ${volumes.CACHE_ENV})")
    p.add_argument("--no-build", action="store_true", help="fail instead of building a missing cache")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
    fmt.add_argument("--csv", dest="fmt", action="store_const", const="csv")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(fmt="json")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("constants")
    s.add_argument("--a", type=float, default=0.0)
    s.add_argument("--b", type=float, default=1.0)
    s.set_defaults(func=cmd_constants)

    s = sub.add_parser("volumes")
    s.add_argument("--n", type=int, default=6)
    s.add_argument("--n-max", type=int, default=None)
    s.set_defaults(func=cmd_volumes)

    s = sub.add_parser("alpha")
    s.add_argument("--n-terms", type=int, default=100)
    s.set_defaults(func=cmd_alpha)

    s = sub.add_parser("moments")
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--a", type=float, default=0.0)
    s.add_argument("--b", type=float, default=1.0)
    s.add_argument("--n-schedule", default="100,400,1600")
    s.set_defaults(func=cmd_moments)

    s = sub.add_parser("poisson")
    s.add_argument("--k-max", type=int, default=4)
    s.add_argument("--a", type=float, default=0.0)
    s.add_argument("--b", type=float, default=1.0)
    s.add_argument("--n", type=int, default=1000)
    s.set_defaults(func=cmd_poisson)

    s = sub.add_parser("systole")
    s.add_argument("--n", type=int, default=10000)
    s.add_argument("--c", default="1,2,3,4,5,6,7,8,9,10")
    s.set_defaults(func=cmd_systole)

    s = sub.add_parser("spectral")
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--eps", type=float, default=0.24)
    s.add_argument("--delta", type=float, default=0.1)
    s.add_argument("--n-schedule", default="")
    s.set_defaults(func=cmd_spectral)

    s = sub.add_parser("build-cache")
    s.set_defaults(func=cmd_build_cache)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(message)s")
    if args.cache is None:
        args.cache = os.environ.get(volumes.CACHE_ENV)
    try:
        if args.precision < 20:
            raise ValueError("precision must be at least 20 digits")
        if args.n_exact > args.n_float:
            raise ValueError("n_exact must not exceed n_float")
        doc = args.func(args)
        if isinstance(doc, dict) and args.command != "build-cache":
            doc = {"command": args.command, "config": _config(args), **doc}
    except Exception as exc:  # reported as a machine-readable record
        emit({"error": {"command": args.command, "type": type(exc).__name__, "message": str(exc)}}, "json")
        return 2
    emit(doc, args.fmt)
    return 0


if __name__ == "__main__":
    sys.exit(main())
