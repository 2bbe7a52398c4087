"""Command-line front end: ``qfdiv <command> [options] [pair.json]``.

Exit codes: 0 ok, 1 property violation, 2 input error, 3 numeric failure.
"""

import argparse
import csv
import io
import json
import math
import os
import re
import sys

from . import divergences as dv
from . import ocf
from . import propcheck
from .errors import InputError, NumericalError
from .reverse_tests import minimal_reverse_test, evaluate_reverse_test, verify_reverse_test
from .serialization import decode_pair, dumps, encode_value, load_json
from .states import commutes

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

WHICH = ("standard", "maximal", "closed", "dbs")
CSV_COLUMNS = ("step", "parameter", "value", "is_infinite")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _default_seed():
    raw = os.environ.get("QFDIV_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"QFDIV_SEED must be an integer, got {raw!r}") from None


def parse_schedule(text):
    """``2^-4..2^-20`` (every power in between) or a comma list of floats."""
    m = re.fullmatch(r"\s*2\^(-?\d+)\s*\.\.\s*2\^(-?\d+)\s*", text)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        step = -1 if hi < lo else 1
        return [2.0 ** k for k in range(lo, hi + step, step)]
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"bad schedule {text!r}") from None


def parse_dims(text):
    parts = re.split(r"[-,:]", text.strip())
    try:
        lo, hi = (int(p) for p in parts) if len(parts) == 2 else (int(parts[0]),) * 2
    except ValueError:
        raise InputError(f"bad dims {text!r}; use e.g. 2-6") from None
    if not 1 <= lo <= hi:
        raise InputError("dims need 1 <= lo <= hi")
    return lo, hi


def _load_chain(text):
    if text is None:
        return None
    if os.path.exists(text):
        return load_json(text)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"bad chain JSON: {exc}") from None


def _rows_csv(rows, extra=()):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS + tuple(extra))
    for row in rows:
        v = row["value"]
        inf = isinstance(v, float) and math.isinf(v)
        w.writerow([row["step"], row["parameter"], "" if inf else repr(float(v)), int(inf)]
                   + [row.get(k, "") for k in extra])
    return buf.getvalue()


def _sequence_rows(params, values):
    return [{"step": k, "parameter": p, "value": v} for k, (p, v) in enumerate(zip(params, values))]


def _rows_json(rows):
    return [dict(r, value=encode_value(r["value"])) for r in rows]


def _trend(values):
    out = [""]
    for a, b in zip(values, values[1:]):
        if math.isinf(a) or math.isinf(b):
            out.append("flat" if a == b else ("up" if b > a else "down"))
        else:
            gap = b - a
            scale = 1e-12 * max(1.0, abs(a))
            out.append("flat" if abs(gap) <= scale else ("up" if gap > 0 else "down"))
    return out


def _pair(args):
    return decode_pair(load_json(args.pair))


def cmd_compute(args):
    rho, sigma = _pair(args)
    f = ocf.parse_function(args.f)
    which = [w.strip() for w in args.which.split(",") if w.strip()]
    bad = [w for w in which if w not in WHICH]
    if bad or not which:
        raise InputError(f"--which takes a comma list from {WHICH}")
    results = {}
    for w in which:
        if w == "standard":
            results[w] = dv.standard_f_divergence(rho, sigma, f).to_json()
        elif w == "maximal":
            results[w] = dv.maximal_f_divergence(rho, sigma, f).to_json()
        elif w == "closed":
            results[w] = {"value": encode_value(dv.maximal_closed_form(rho, sigma, f)), "method": "closed-form"}
        else:
            results[w] = {"value": encode_value(dv.d_bs(rho, sigma)), "method": "belavkin-staszewski"}
    if args.format == "csv":
        rows = [{"step": k, "parameter": w, "value": _report_value(results[w])} for k, w in enumerate(which)]
        return _rows_csv(rows), EXIT_OK
    doc = {"command": "compute", "f": ocf.to_json(f), "commutes": commutes(rho, sigma), "results": results}
    return dumps(doc), EXIT_OK


def _report_value(report_json):
    v = report_json["value"]
    return math.inf if v == "inf" else float(v)


def cmd_compare(args):
    rho, sigma = _pair(args)
    f = ocf.parse_function(args.f)
    tol = 1e-8 if args.tol is None else args.tol
    measured, _ = dv.measured_estimate(rho, sigma, f, restarts=args.trials or 4, seed=args.seed)
    standard = dv.standard_f_divergence(rho, sigma, f).value
    maximal = dv.maximal_f_divergence(rho, sigma, f).value
    triple = [measured, standard, maximal]
    ordered = all(propcheck.leq(a, b, tol) for a, b in zip(triple, triple[1:]))

    def gap(a, b):
        if math.isinf(b) and math.isinf(a):
            return 0.0
        return b - a

    doc = {
        "command": "compare",
        "f": ocf.to_json(f),
        "commutes": commutes(rho, sigma),
        "measured": encode_value(measured),
        "standard": encode_value(standard),
        "maximal": encode_value(maximal),
        "gaps": {"standard_minus_measured": encode_value(gap(measured, standard)),
                 "maximal_minus_standard": encode_value(gap(standard, maximal))},
        "ordered": ordered,
    }
    if args.format == "csv":
        rows = _sequence_rows(["measured", "standard", "maximal"], triple)
        return _rows_csv(rows), EXIT_OK
    return dumps(doc), EXIT_OK


def cmd_renyi(args):
    rho, sigma = _pair(args)
    if args.alpha is None:
        raise InputError("renyi needs --alpha")
    variants = dv.RENYI_VARIANTS if args.variant == "all" else (args.variant,)
    if any(v not in dv.RENYI_VARIANTS for v in variants):
        raise InputError(f"--variant takes one of {dv.RENYI_VARIANTS + ('all',)}")
    values = [dv.renyi(rho, sigma, args.alpha, v) for v in variants]
    if args.format == "csv":
        return _rows_csv(_sequence_rows(variants, values)), EXIT_OK
    doc = {"command": "renyi", "alpha": args.alpha,
           "values": {v: encode_value(x) for v, x in zip(variants, values)}}
    return dumps(doc), EXIT_OK


def cmd_sweep_eps(args):
    rho, sigma = _pair(args)
    f = ocf.parse_function(args.f)
    schedule = parse_schedule(args.schedule)
    values = dv.eps_regularized_maximal(rho, sigma, f, schedule, mode=args.mode)
    rows = _sequence_rows(schedule, values)
    for row, tr in zip(rows, _trend(values)):
        row["trend"] = tr
    if args.format == "csv":
        return _rows_csv(rows, extra=("trend",)), EXIT_OK
    limit = dv.maximal_f_divergence(rho, sigma, f).value
    doc = {"command": "sweep-eps", "f": ocf.to_json(f), "mode": args.mode,
           "sequence": _rows_json(rows), "maximal": encode_value(limit)}
    return dumps(doc), EXIT_OK


def _is_partition_chain(chain):
    return all(isinstance(p, list) and all(isinstance(b, list) for b in p) for p in chain)


def cmd_martingale(args):
    rho, sigma = _pair(args)
    f = ocf.parse_function(args.f)
    chain = _load_chain(args.chain)
    d = rho.dim
    if chain is None:
        chain = [[[i] for i in range(k)] + [list(range(k, d))] for k in range(d - 1, -1, -1)]
        chain = [[b for b in p if b] for p in chain]
    if not isinstance(chain, list) or not chain:
        raise InputError("--chain must be a non-empty JSON list")
    if _is_partition_chain(chain):
        kind = "martingale"
        values = dv.martingale_sequence(rho, sigma, f, chain)
        params = list(range(len(chain)))
    elif all(isinstance(s, list) and all(isinstance(i, int) for i in s) for s in chain):
        kind = "compression"
        values = dv.compression_sequence(rho, sigma, f, chain)
        params = [len(set(s)) for s in chain]
    else:
        raise InputError("--chain must be a list of partitions or a list of index lists")
    rows = _sequence_rows(params, values)
    if args.format == "csv":
        return _rows_csv(rows), EXIT_OK
    doc = {"command": "martingale", "kind": kind, "f": ocf.to_json(f), "chain": chain,
           "sequence": _rows_json(rows), "maximal": encode_value(dv.maximal_f_divergence(rho, sigma, f).value)}
    return dumps(doc), EXIT_OK


def cmd_reverse_test(args):
    rho, sigma = _pair(args)
    rt = minimal_reverse_test(rho, sigma)
    ver = verify_reverse_test(rt, rho, sigma)
    doc = rt.to_json()
    doc["verification"] = {"ok": ver.ok, "rho_residual": ver.rho_residual, "sigma_residual": ver.sigma_residual,
                           "rho_trace_residual": ver.rho_trace_residual,
                           "sigma_trace_residual": ver.sigma_trace_residual}
    if args.f_given:
        doc["value"] = encode_value(evaluate_reverse_test(rt, ocf.parse_function(args.f)))
    if args.format == "csv":
        rows = [{"step": k, "parameter": "nu", "value": a.nu} for k, a in enumerate(rt.atoms)]
        return _rows_csv(rows), EXIT_OK
    return dumps(doc), EXIT_OK if ver.ok else EXIT_NUMERIC


def cmd_propcheck(args):
    names = list(propcheck.SUITES) if args.suite == "all" else [s.strip() for s in args.suite.split(",")]
    unknown = [n for n in names if n not in propcheck.SUITES]
    if unknown:
        raise InputError(f"unknown suite(s) {unknown}; choose from {list(propcheck.SUITES)}")
    dims = parse_dims(args.dims) if args.dims else None
    trials = 200 if args.trials is None else args.trials
    if trials < 0:
        raise InputError("--trials must be non-negative")
    results = propcheck.run_suites(names, trials, args.seed, tol=args.tol, dims=dims)
    failed = [r for r in results if not r.ok]
    for r in failed:
        first = r.violations[0]
        print(f"{r.name}: {len(r.violations)} violation(s), seed {args.seed}, first: "
              f"{json.dumps(first, default=_json_fallback)}", file=sys.stderr)
    if args.format == "csv":
        rows = [{"step": k, "parameter": r.name, "value": float(len(r.violations))} for k, r in enumerate(results)]
        return _rows_csv(rows), EXIT_VIOLATION if failed else EXIT_OK
    doc = {"command": "propcheck", "seed": args.seed, "trials": trials,
           "suites": [{"name": r.name, "checks": r.checks, "violations": len(r.violations), "ok": r.ok}
                      for r in results],
           "ok": not failed}
    return dumps(doc), EXIT_VIOLATION if failed else EXIT_OK


def _json_fallback(x):
    if hasattr(x, "tolist"):
        x = x.tolist()
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, list):
        return [_json_fallback(v) if isinstance(v, (complex, list)) else v for v in x]
    return str(x)


COMMANDS = {
    "compute": cmd_compute,
    "compare": cmd_compare,
    "renyi": cmd_renyi,
    "sweep-eps": cmd_sweep_eps,
    "martingale": cmd_martingale,
    "reverse-test": cmd_reverse_test,
    "propcheck": cmd_propcheck,
}


def build_parser():
    p = _Parser(prog="qfdiv", description="Standard and maximal quantum f-divergences.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        s = sub.add_parser(name)
        if name != "propcheck":
            s.add_argument("pair", help="JSON file with keys rho and sigma")
        s.add_argument("--f", default=None, help="xlogx, neglog, power:A, negpower:A, square, chi2, "
                                                 "affine:a,b or a JSON function object")
        s.add_argument("--which", default="standard,maximal")
        s.add_argument("--alpha", type=float)
        s.add_argument("--variant", default="all")
        s.add_argument("--schedule", default="2^-4..2^-20")
        s.add_argument("--mode", default="eta", choices=dv.EPS_MODES)
        s.add_argument("--chain", help="JSON (inline or file): partitions or index lists")
        s.add_argument("--suite", default="all")
        s.add_argument("--trials", type=int)
        s.add_argument("--dims")
        s.add_argument("--seed", type=int)
        s.add_argument("--tol", type=float)
        s.add_argument("--out")
        s.add_argument("--format", default="json", choices=("json", "csv"))
    return p


def run(argv=None):
    """Execute one command; returns ``(text, exit_code)`` without touching stdout."""
    args = build_parser().parse_args(argv)
    args.f_given = args.f is not None
    if args.f is None:
        args.f = "xlogx"
    if args.seed is None:
        args.seed = _default_seed()
    return COMMANDS[args.command](args), args


def main(argv=None):
    try:
        (text, code), args = run(argv)
    except InputError as exc:
        print(f"qfdiv: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, ArithmeticError) as exc:
        print(f"qfdiv: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"qfdiv: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
            return EXIT_INPUT
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
