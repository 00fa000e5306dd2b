"""Command-line front end.

Exit codes: 0 success / all checks pass, 1 domain error or failed check,
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from .errors import CalibrationError, DomainError, GridError, QBosonError
from .fock import DensityMatrix, FockOperator
from .qcalc import BIG_E, SMALL_E, q_exponential, q_factorial, q_number
from .representations import diagonal_representation, normal_order_coeffs, q_poisson_pmf
from .verify import SUITES, RunConfig, run_suite

CSV_HELP = """\
CSV columns (stable):
  qfunc         n,q_number,q_factorial     |  x,variant,re,im (with --exp)
  poisson       n,pmf                      (last row: tail,<mass beyond nmax>)
  verify        check,residual,tolerance,pass
  diagrep       n,m,p,ell,coef_re,coef_im
  normal-order  p,s,re,im
"""


class UsageError(Exception):
    pass


def _range(text):
    try:
        if ".." in text:
            lo, hi = text.split("..")
            lo, hi = int(lo), int(hi)
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or A..B, got {text!r}")
    if lo < 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    return lo, hi


def _grid(text):
    try:
        j, m = text.lower().split("x")
        return int(j), int(m)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected JxM such as 200x64, got {text!r}")


def _emit(rows, header, fmt, out):
    if fmt == "json":
        json.dump([dict(zip(header, r)) for r in rows], out, indent=2)
        out.write("\n")
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    else:
        cells = [[str(h) for h in header]] + [[_fmt(v) for v in r] for r in rows]
        widths = [max(len(c[i]) for c in cells) for i in range(len(header))]
        for c in cells:
            out.write("  ".join(v.rjust(w) for v, w in zip(c, widths)) + "\n")


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def cmd_qfunc(args, out):
    if args.exp is not None:
        val = complex(q_exponential(args.exp, args.q, args.variant))
        rows = [(args.exp, args.variant, val.real, val.imag)]
        if args.format == "table":
            out.write(f"{val.real:.12g}\n" if val.imag == 0 else f"{val:.12g}\n")
        else:
            _emit(rows, ("x", "variant", "re", "im"), args.format, out)
        return 0
    lo, hi = args.n
    rows = [(n, q_number(n, args.q), q_factorial(n, args.q)) for n in range(lo, hi + 1)]
    _emit(rows, ("n", "q_number", "q_factorial"), args.format, out)
    return 0


def cmd_poisson(args, out):
    pmf, tail = q_poisson_pmf(args.s, args.q, args.nmax)
    rows = [(n, float(p)) for n, p in enumerate(pmf)]
    rows.append(("tail", float(tail)))
    _emit(rows, ("n", "pmf"), args.format, out)
    return 0


def cmd_verify(args, out):
    J, M = args.grid
    try:
        cfg = RunConfig(q=args.q, n_max=args.nmax, J=J, M=M, tol=args.tol, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc))
    try:
        report = run_suite(args.suite, cfg)
    except (GridError, CalibrationError) as exc:
        raise UsageError(str(exc))
    if args.format == "json":
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        rows = [(c["check"], c["residual"], c["tolerance"], c["pass"]) for c in report["checks"]]
        _emit(rows, ("check", "residual", "tolerance", "pass"), args.format, buf)
        text = buf.getvalue()
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return 0 if report["pass"] else 1


def _load_operator(path):
    with open(path, encoding="utf-8") as fh:
        d = json.load(fh)
    m = np.asarray(d["re"], dtype=float) + 1j * np.asarray(d.get("im", 0.0), dtype=float)
    return d, FockOperator(m, d["n_max"], d["q"])


def cmd_diagrep(args, out):
    with open(args.rho, encoding="utf-8") as fh:
        rho = DensityMatrix.from_json(fh.read())
    rep = diagonal_representation(rho, args.threshold)
    if args.format == "json":
        out.write(rep.to_json() + "\n")
    else:
        _emit(rep.rows(), ("n", "m", "p", "ell", "coef_re", "coef_im"), args.format, out)
    return 0


def cmd_normal_order(args, out):
    _, F = _load_operator(args.operator)
    coeffs = normal_order_coeffs(F, args.cutoff)
    if args.format == "json":
        out.write(coeffs.to_json() + "\n")
    else:
        rows = [(p, s, coeffs.table[p, s].real, coeffs.table[p, s].imag)
                for p in range(args.cutoff + 1) for s in range(args.cutoff + 1)]
        _emit(rows, ("p", "s", "re", "im"), args.format, out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qboson",
        description="q-deformed boson calculus, coherent-state projections and kernel checks.",
        epilog=CSV_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = dict(choices=("table", "csv", "json"), default="table")

    p = sub.add_parser("qfunc", help="tabulate [n], [n]! or evaluate a q-exponential",
                       epilog=CSV_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--n", type=_range, default=(0, 10), help="range A..B (default 0..10)")
    p.add_argument("--exp", type=float, help="evaluate the q-exponential at this x")
    p.add_argument("--variant", choices=(SMALL_E, BIG_E), default=SMALL_E)
    p.add_argument("--format", **fmt)
    p.set_defaults(func=cmd_qfunc)

    p = sub.add_parser("poisson", help="q-Poisson pmf table",
                       epilog=CSV_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--s", type=float, required=True, help="mean-field intensity |z|^2")
    p.add_argument("--nmax", type=int, default=None,
                   help="last tabulated level (default: until the tail is negligible)")
    p.add_argument("--format", **fmt)
    p.set_defaults(func=cmd_poisson)

    p = sub.add_parser("verify", help="run a verification suite and write a JSON report",
                       epilog=CSV_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("suite", choices=SUITES + ("all",))
    p.add_argument("--q", type=float, default=0.5)
    p.add_argument("--nmax", type=int, default=12)
    p.add_argument("--grid", type=_grid, default=(200, 64), help="JxM (default 200x64)")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--format", choices=("json", "csv", "table"), default="json")
    p.add_argument("--output", help="write the report here instead of stdout")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("diagrep", help="diagonal-representation terms of a density matrix")
    p.add_argument("rho", help="density-matrix JSON {n_max, q, re, im}")
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--format", **fmt)
    p.set_defaults(func=cmd_diagrep)

    p = sub.add_parser("normal-order", help="normal-ordering coefficients of an operator")
    p.add_argument("operator", help="operator JSON {n_max, q, re, im}")
    p.add_argument("--cutoff", type=int, default=2)
    p.add_argument("--format", **fmt)
    p.set_defaults(func=cmd_normal_order)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"qboson: error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, QBosonError, OverflowError) as exc:
        print(f"qboson: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"qboson: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"qboson: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
