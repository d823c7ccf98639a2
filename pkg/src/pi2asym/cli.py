"""Command-line interface: ``pi2asym --subcommand NAME [options]``.

Subcommands
-----------
classify    regime of every grid point
eval        y on an (x, t) or (s, t) grid
sweep       eval on an (s, t) grid with the leading coefficient ``leading/|t|**(1/2)``
modulation  branch points and residuals along ``--s-range``
verify      run the verification suite; exit status 1 if a check fails
hm-table    Hastings-McLeod profile on the ``--x-range`` grid

Grids are ``a:b:n`` (``n`` evenly spaced points) or a single number. Rows
are ordered t-major, then x (or s). CSV uses LF line endings and 17
significant digits; JSON is ``{"meta": ..., "records": [...]}``.
"""

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .core import EDGE_WIDTH, ScalePoint, classify
from .critical import hastings_mcleod
from .evaluate import evaluate
from .modulation import continuation_sweep, residuals
from .verification import CHECKS, run_checks

SCHEMA_VERSION = 1
SUBCOMMANDS = ("classify", "eval", "sweep", "modulation", "verify", "hm-table")

HEADERS = {
    "classify": ("x", "t", "s", "regime", "error"),
    "eval": ("x", "t", "s", "regime", "leading", "correction", "value", "error_order", "error"),
    "sweep": ("x", "t", "s", "regime", "leading", "correction", "value", "leading_scaled",
              "error_order", "error"),
    "modulation": ("s", "beta3", "alpha", "beta2", "beta1", "r1", "r2", "r3"),
    "verify": ("check", "metric", "measured", "tolerance", "kind", "passed", "error"),
    "hm-table": ("xi", "q", "dq"),
}


class UsageError(Exception):
    pass


def parse_range(text):
    """``'a:b:n'`` -> ``n`` points from ``a`` to ``b``; ``'a'`` -> ``[a]``."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        if len(parts) != 3:
            raise ValueError
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"bad range {text!r}; expected a:b:n or a number") from None
    if n < 1:
        raise UsageError(f"range {text!r} needs at least one point")
    if n == 1:
        return [a]
    return [float(v) for v in np.linspace(a, b, n)]


def parse_tol(items):
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"bad --tol {item!r}; expected NAME=VALUE")
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise UsageError(f"bad --tol value in {item!r}") from None
    return out


def build_parser():
    p = argparse.ArgumentParser(prog="pi2asym", description=__doc__.split("\n")[0],
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--subcommand", required=True, choices=SUBCOMMANDS)
    p.add_argument("--s-range", help="a:b:n grid in s = x |t|**(-3/2)")
    p.add_argument("--t-range", help="a:b:n grid in t")
    p.add_argument("--x-range", help="a:b:n grid in x (xi for hm-table)")
    p.add_argument("--edge-width", type=float, default=EDGE_WIDTH)
    p.add_argument("--format", choices=("csv", "json"), default=None,
                   help="default csv, json for verify")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--tol", action="append", metavar="NAME=VALUE",
                   help="tolerance override: CHECK, CHECK.metric or 'all'")
    p.add_argument("--only", action="append", metavar="CHECK", choices=sorted(CHECKS),
                   help="run only this verify check (repeatable)")
    p.add_argument("--seed", type=int, default=0, help="reserved; ignored")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for eval/sweep")
    return p


# ---------------------------------------------------------------------------
# record producers
# ---------------------------------------------------------------------------

def _grid(args):
    if args.t_range is None:
        raise UsageError("--t-range is required")
    ts = parse_range(args.t_range)
    if args.x_range is not None and args.s_range is not None:
        raise UsageError("give either --x-range or --s-range, not both")
    if args.x_range is not None:
        return [("x", v, t) for t in ts for v in parse_range(args.x_range)]
    if args.s_range is not None:
        return [("s", v, t) for t in ts for v in parse_range(args.s_range)]
    raise UsageError("--x-range or --s-range is required")


def _point(kind, v, t):
    return ScalePoint.from_xt(v, t) if kind == "x" else ScalePoint.from_st(v, t)


def _nan_row(kind, v, t, header):
    row = dict.fromkeys(header, float("nan"))
    row.update(x=v if kind == "x" else float("nan"), t=t, s=v if kind == "s" else float("nan"),
               regime="", error_order="", error="")
    if t != 0.0:
        row["x" if kind == "s" else "s"] = (v * abs(t) ** 1.5) if kind == "s" else v * abs(t) ** -1.5
    return row


def _classify_one(task):
    kind, v, t, width = task
    row = _nan_row(kind, v, t, HEADERS["classify"])
    try:
        p = _point(kind, v, t)
        row["regime"] = classify(p, width).value
    except Exception as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _eval_one(task):
    kind, v, t, width, scaled = task
    header = HEADERS["sweep" if scaled else "eval"]
    row = _nan_row(kind, v, t, header)
    try:
        p = _point(kind, v, t)
        row["regime"] = classify(p, width).value
        r = evaluate(p.x, p.t, edge_width=width)
        row.update(leading=r.leading, correction=r.correction, value=r.value,
                   error_order=r.error_order)
        if scaled:
            row["leading_scaled"] = r.leading / math.sqrt(abs(p.t))
    except Exception as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _run_map(fn, tasks, jobs):
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    return [fn(t) for t in tasks]


def cmd_classify(args):
    tasks = [(k, v, t, args.edge_width) for k, v, t in _grid(args)]
    return _run_map(_classify_one, tasks, args.jobs), True


def cmd_eval(args, scaled=False):
    tasks = [(k, v, t, args.edge_width, scaled) for k, v, t in _grid(args)]
    if args.jobs > 1:
        hastings_mcleod()  # build once so forked workers inherit the cache
    return _run_map(_eval_one, tasks, args.jobs), True


def cmd_sweep(args):
    if args.s_range is None:
        raise UsageError("sweep needs --s-range")
    return cmd_eval(args, scaled=True)


def cmd_modulation(args):
    if args.s_range is None:
        raise UsageError("modulation needs --s-range a:b:n")
    s_vals = parse_range(args.s_range)
    if len(s_vals) == 1:
        trace = continuation_sweep(s_vals[0], s_vals[0])
    else:
        trace = continuation_sweep(s_vals[0], s_vals[-1], len(s_vals))
    rows = []
    for m in trace.points:
        r1, r2, r3 = residuals(m)
        rows.append(dict(s=m.s, beta3=m.beta3, alpha=m.alpha, beta2=m.beta2, beta1=m.beta1,
                         r1=r1, r2=r2, r3=r3))
    return rows, True


def cmd_verify(args):
    results = run_checks(args.only, parse_tol(args.tol))
    rows = []
    for res in results:
        if not res.metrics:
            rows.append(dict(check=res.name, metric="", measured=float("nan"),
                             tolerance=float("nan"), kind="", passed=False, error=res.error or ""))
        for m in res.metrics:
            rows.append(dict(check=res.name, metric=m.name, measured=m.measured,
                             tolerance=m.tolerance, kind=m.kind, passed=m.passed,
                             error=res.error or ""))
    return rows, all(r.passed for r in results), results


def cmd_hm_table(args):
    hm = hastings_mcleod()
    lo, hi = hm.domain
    xi = parse_range(args.x_range) if args.x_range else [float(v) for v in np.linspace(lo, hi, 221)]
    rows = []
    for v in xi:
        rows.append(dict(xi=v, q=float(hm(v)), dq=float(hm.derivative(v))))
    return rows, True


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, dict):
        return {str(k): _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    return v


def render(sub, rows, fmt, config, extra=None):
    header = HEADERS[sub]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(r[h]) for h in header])
        return buf.getvalue()
    doc = {"meta": {"version": __version__, "schema_version": SCHEMA_VERSION,
                    "subcommand": sub, "config": config},
           "records": [{h: _json_value(r[h]) for h in header} for r in rows]}
    if extra:
        doc.update(_json_value(extra))
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


_VALUE_FLAGS = ("--s-range", "--t-range", "--x-range", "--edge-width", "--tol")


def _join_negative(argv):
    # let "--x-range -4:4:9" through; argparse would read "-4:4:9" as a flag
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_join_negative(argv))
    sub = args.subcommand
    fmt = args.format or ("json" if sub == "verify" else "csv")
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("out",)}
    config["format"] = fmt
    try:
        if args.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        if not args.edge_width >= 0.0:
            raise UsageError("--edge-width must be non-negative")
        extra = None
        if sub == "classify":
            rows, ok = cmd_classify(args)
        elif sub == "eval":
            rows, ok = cmd_eval(args)
        elif sub == "sweep":
            rows, ok = cmd_sweep(args)
        elif sub == "modulation":
            rows, ok = cmd_modulation(args)
        elif sub == "verify":
            rows, ok, results = cmd_verify(args)
            extra = {"checks": [r.as_dict() for r in results], "passed": ok}
        else:
            rows, ok = cmd_hm_table(args)
    except UsageError as exc:
        parser.error(str(exc))
    text = render(sub, rows, fmt, config, extra)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
