"""Command-line surface: bound evaluation, searches, constant tables, figure
data, and number-theory scans.

Exit codes are stable across subcommands: 0 when the computation completed
and is certified, 2 on domain or configuration errors, 3 when a numeric
kernel failed to converge.  Numeric inputs are parsed from decimal/rational
strings exactly; flag values override config-file values; FEL_DIGITS sets
the default working precision.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from decimal import InvalidOperation
from fractions import Fraction

import mpmath as mp

from . import closed_form, lower, nt, search, tables, upper
from .precision import PrecisionContext, Unconverged

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_UNCONVERGED = 3

_MAX_DIGITS = 100


class _CliError(ValueError):
    pass


def _parse_penalty(s: str):
    if s in ("inf", "oo", "infinity"):
        return lower.INF
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as e:
        raise _CliError("cannot parse penalty %r: %s" % (s, e))


def _context(ns) -> PrecisionContext:
    digits = ns.get("digits")
    if digits is None:
        digits = int(os.environ.get("FEL_DIGITS", "40"))
    digits = int(digits)
    if not 30 <= digits <= _MAX_DIGITS:
        raise _CliError("digits must be between 30 and %d" % _MAX_DIGITS)
    return PrecisionContext.make(digits)


def _emit(ns, payload, csv_rows=None, csv_header=None):
    """Write the report as JSON (default) or CSV to --out or stdout."""
    fmt = ns.get("format") or "json"
    out = ns.get("out")
    if fmt == "json":
        text = json.dumps(payload, indent=2)
    elif fmt == "csv":
        if csv_rows is None:
            raise _CliError("this command has no CSV form")
        import io

        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if csv_header:
            w.writerow(csv_header)
        w.writerows(csv_rows)
        text = buf.getvalue().rstrip("\n")
    else:
        raise _CliError("unknown format %r" % fmt)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _load_json_file(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise _CliError("cannot read %s: %s" % (path, e))


def _lower_params(ns) -> lower.LowerParams:
    if ns.get("params"):
        return lower.LowerParams.from_json(_load_json_file(ns["params"]))
    key = ns.get("A")
    ref = tables.lower_reference()
    if key in ref:
        return ref[key][1]
    raise _CliError("no --params file and no shipped reference for penalty %r" % key)


def _upper_params(ns) -> upper.UpperParams:
    if ns.get("params"):
        return upper.UpperParams.from_json(_load_json_file(ns["params"]))
    key = ns.get("A")
    ref = tables.upper_reference()
    if key in ref:
        return ref[key][1]
    if key is not None and Fraction(key) == 0:
        return upper.UpperParams(penalty=Fraction(0), knots=())
    raise _CliError("no --params file and no shipped reference for penalty %r" % key)


def cmd_lower_eval(ns) -> int:
    ctx = _context(ns)
    if ns.get("A") is None:
        raise _CliError("--A is required")
    penalty = _parse_penalty(ns["A"])
    p = _lower_params(ns)
    value = lower.reward(p, penalty, ctx)
    l1 = lower.l1_norm(p, ctx)
    with ctx.workprec():
        payload = {
            "penalty": ns["A"],
            "value": mp.nstr(value.value, 25),
            "err": mp.nstr(value.err, 6),
            "certified_lower_bound": mp.nstr(value.value - value.err, 25),
            "l1_norm": mp.nstr(l1.value, 15),
            "l1_err": mp.nstr(l1.err, 6),
            "params": p.to_json(),
            "digits": ctx.digits,
        }
    _emit(ns, payload)
    return EXIT_OK


def cmd_upper_eval(ns) -> int:
    ctx = _context(ns)
    up = _upper_params(ns)
    res = upper.sup_norm(up, ctx)
    payload = {"penalty": str(up.penalty), **res.to_json(), "params": up.to_json(), "digits": ctx.digits}
    _emit(ns, payload)
    return EXIT_OK if res.certified else EXIT_UNCONVERGED


def cmd_search(ns) -> int:
    ctx = _context(ns)
    problem = ns.get("problem")
    if problem not in ("lower", "upper"):
        raise _CliError("--problem must be lower or upper")
    if ns.get("A") is None:
        raise _CliError("--A is required")
    penalty = _parse_penalty(ns["A"])
    cfg = search.SearchConfig(
        seed=int(ns.get("seed") or 0),
        n_max=int(ns.get("N") or 8),
        restarts=int(ns.get("restarts") or 8),
        budget=int(ns.get("budget") or 100_000),
    )
    if problem == "lower":
        if penalty is lower.INF:
            n_terms = int(ns.get("N") or 1)
        else:
            n_terms = int(ns.get("N") or 8)
        params, bound = search.optimize_lower(penalty, n_terms, cfg, ctx,
                                              transcript_path=ns.get("transcript"))
        with ctx.workprec():
            payload = {
                "problem": "lower",
                "penalty": ns["A"],
                "value": mp.nstr(bound.value, 25),
                "err": mp.nstr(bound.err, 6),
                "certified_lower_bound": mp.nstr(bound.value - bound.err, 25),
                "params": params.to_json(),
                "seed": cfg.seed,
            }
    else:
        if penalty is lower.INF:
            raise _CliError("upper search needs a finite penalty")
        params, bound = search.optimize_upper(penalty, cfg, ctx,
                                              transcript_path=ns.get("transcript"))
        payload = {
            "problem": "upper",
            "penalty": ns["A"],
            **bound.to_json(),
            "params": params.to_json(),
            "seed": cfg.seed,
        }
    _emit(ns, payload)
    return EXIT_OK


def cmd_bounds(ns) -> int:
    ctx = _context(ns)
    rows = []
    for key in tables.PENALTIES:
        lo, hi = tables.interval(key)
        A = Fraction(key)
        formula = None
        if 0 < A < 1:
            formula = mp.nstr(closed_form.closed_lower_bound(key, ctx), 10)
        rows.append({
            "penalty": key,
            "formula_lower": formula,
            "table_lower": str(lo),
            "table_upper": str(hi),
            "implied_constant": mp.nstr(closed_form.implied_constant(str(lo), ctx), 10),
            "method_limit": mp.nstr(closed_form.implied_constant(str(hi), ctx), 10),
        })
    orders = ns.get("orders")
    if orders:
        for ell in (int(x) for x in str(orders).split(",")):
            if ell in tables.ORDER_TO_PENALTY:
                key = tables.ORDER_TO_PENALTY[ell]
                lo, hi = tables.interval(key)
                rows.append({
                    "order": ell,
                    "penalty": key,
                    "implied_constant": mp.nstr(closed_form.implied_constant(str(lo), ctx), 10),
                    "method_limit": mp.nstr(closed_form.implied_constant(str(hi), ctx), 10),
                })
            else:
                rows.append({
                    "order": ell,
                    "implied_constant": mp.nstr(closed_form.large_order_constant(ell, ctx), 10),
                    "simple_variant": mp.nstr(closed_form.large_order_constant(ell, ctx, simple=True), 10),
                })
    header = ["penalty", "order", "formula_lower", "table_lower", "table_upper",
              "implied_constant", "method_limit", "simple_variant"]
    csv_rows = [[row.get(h, "") for h in header] for row in rows]
    _emit(ns, {"rows": rows, "digits": ctx.digits}, csv_rows=csv_rows, csv_header=header)
    return EXIT_OK


def cmd_plot_data(ns) -> int:
    figure = ns.get("figure")
    samples = int(ns.get("samples") or 0)
    if samples < 1:
        raise _CliError("--samples must be >= 1")
    rng = ns.get("range") or []
    out = ns.get("out")
    rows = []
    if figure == "upper":
        if ns.get("A") is None:
            raise _CliError("--A is required for the upper figure")
        up = _upper_params(ns)
        lo, hi = (float(rng[0]), float(rng[1])) if len(rng) == 2 else (0.0, 15.0)
        header = ["t", "re", "abs"]
        rows = upper.curve_samples(up, lo, hi, samples)
    elif figure == "lower-family":
        lo, hi = (float(rng[0]), float(rng[1])) if len(rng) == 2 else (-1.5, 0.5)
        header = ["t"] + ["penalty_" + k.replace("/", "_") for k in tables.PENALTIES]
        ref = tables.lower_reference()
        columns = [lower.curve_samples(ref[k][1], lo, hi, samples) for k in tables.PENALTIES]
        for i in range(samples):
            rows.append([columns[0][i][0]] + [col[i][1] for col in columns])
    else:
        raise _CliError("--figure must be 'upper' or 'lower-family'")
    ns["format"] = "csv"
    _emit(ns, None, csv_rows=rows, csv_header=header)
    return EXIT_OK


def cmd_nt(ns) -> int:
    kind = ns.get("kind")
    out = ns.get("out")
    if kind in ("qnr", "prime-qr"):
        lo = int(ns.get("min_p") or nt.DEFAULT_SCAN_FLOORS[kind])
        hi = int(ns.get("max_p") or 10**6)
        records = nt.scan(kind, lo, hi)
        summary = _stream_records(records, kind, out)
    elif kind == "ap":
        lo = int(ns.get("min_q") or nt.DEFAULT_SCAN_FLOORS["ap"])
        hi = int(ns.get("max_q") or 500)
        records = nt.scan("ap", lo, hi)
        summary = _stream_records(records, "ap", out)
    elif kind == "prime-sum":
        m = int(ns.get("m") or 10**6)
        cut = mp.log(m) / (2 * mp.pi)
        g = nt.raised_cosine_bump(0.05 * float(cut), 0.95 * float(cut))
        report = nt.prime_sum_check(m, g)
        _emit(ns, report.to_json())
        return EXIT_OK
    else:
        raise _CliError("--kind must be qnr, prime-qr, ap, or prime-sum")
    print(json.dumps(summary.to_json(), indent=2))
    return EXIT_OK


def _stream_records(records, kind, out):
    summary = nt.ScanSummary(comparator=nt.COMPARATORS[kind], kind=kind)
    fh = open(out, "w") if out else None
    try:
        if fh:
            fh.write("key,value,ratio\n")
        for rec in records:
            summary.update(rec)
            if fh:
                fh.write(rec.csv_row() + "\n")
    finally:
        if fh:
            fh.close()
    return summary


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fel",
        description="Certified bounds for a family of Fourier-extremal constants.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--digits", type=int, default=None,
                       help="working precision in decimal digits (default: FEL_DIGITS or 40)")
        p.add_argument("--format", choices=("json", "csv"), default=None)
        p.add_argument("--out", default=None, help="write the report to this file")
        p.add_argument("--config", default=None, help="JSON config file; flags override it")

    p = sub.add_parser("lower-eval", help="evaluate the lower-family reward")
    p.add_argument("--A", default=None, help="penalty as a rational string, or 'inf'")
    p.add_argument("--params", default=None, help="JSON parameter file (defaults to the shipped reference)")
    common(p)

    p = sub.add_parser("upper-eval", help="certified sup-norm of an upper test function")
    p.add_argument("--A", default=None)
    p.add_argument("--params", default=None)
    common(p)

    p = sub.add_parser("search", help="derivative-free search for better test functions")
    p.add_argument("--problem", choices=("lower", "upper"), required=True)
    p.add_argument("--A", default=None)
    p.add_argument("--N", type=int, default=None, help="coefficient count (lower) / max knots (upper)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--transcript", default=None, help="JSON-lines incumbent log")
    common(p)

    p = sub.add_parser("bounds", help="table of bounds and implied constants")
    p.add_argument("--orders", default=None, help="comma-separated character orders to include")
    common(p)

    p = sub.add_parser("plot-data", help="CSV curve data for the figures")
    p.add_argument("--figure", choices=("upper", "lower-family"), required=True)
    p.add_argument("--A", default=None)
    p.add_argument("--params", default=None)
    p.add_argument("--range", nargs=2, metavar=("LO", "HI"), default=None)
    p.add_argument("--samples", type=int, default=None)
    common(p)

    p = sub.add_parser("nt", help="number-theory scans and the prime-sum check")
    p.add_argument("--kind", choices=("qnr", "prime-qr", "ap", "prime-sum"), required=True)
    p.add_argument("--min-p", dest="min_p", type=int, default=None)
    p.add_argument("--max-p", dest="max_p", type=int, default=None)
    p.add_argument("--min-q", dest="min_q", type=int, default=None)
    p.add_argument("--max-q", dest="max_q", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    common(p)

    return ap


_COMMANDS = {
    "lower-eval": cmd_lower_eval,
    "upper-eval": cmd_upper_eval,
    "search": cmd_search,
    "bounds": cmd_bounds,
    "plot-data": cmd_plot_data,
    "nt": cmd_nt,
}


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    ns = vars(args)
    if ns.get("config"):
        try:
            defaults = _load_json_file(ns["config"])
        except _CliError as e:
            print("error: %s" % e, file=sys.stderr)
            return EXIT_DOMAIN
        for k, v in defaults.items():
            k = k.replace("-", "_")
            if ns.get(k) is None:
                ns[k] = v
    try:
        return _COMMANDS[args.command](ns)
    except Unconverged as e:
        print("unconverged: %s" % e, file=sys.stderr)
        return EXIT_UNCONVERGED
    except (_CliError, ValueError, InvalidOperation, LookupError) as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
