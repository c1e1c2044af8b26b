"""Command-line front end: ``boolcube <command> ...``.

Exit codes: 0 success, 2 an inequality or certificate failed, 64 usage or
input error, 70 internal inconsistency (for example a non-dictator maximizer).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

from . import bounds, search
from ._parallel import default_workers
from .errors import (
    BoolcubeError,
    BudgetExceeded,
    DimensionMismatch,
    DimensionTooLarge,
    DomainError,
    NonDictatorMaximizer,
    NumericalInconsistency,
    ParseError,
)
from .hypercube import parse_table, wht
from .information import TOL, gap, mutual_information, source_mi
from .source import joint_distribution, monte_carlo_joint, theta_rho

EXIT_OK = 0
EXIT_VIOLATION = 2
EXIT_USAGE = 64
EXIT_INTERNAL = 70

SCHEMA_VERSION = 1
GRID_SLACK = 1e-12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_grid(text, names=None):
    """Parse ``start:stop:step`` (stop included within 1e-12), a comma list, or one value.

    ``names`` maps symbolic tokens such as ``rmax`` to numbers.
    """
    names = names or {}

    def number(token):
        token = token.strip()
        if token in names:
            return float(names[token])
        try:
            return float(token)
        except ValueError:
            raise ParseError(f"not a number: {token!r}", text.find(token)) from None

    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ParseError("grid must be start:stop:step", 0)
        start, stop, step = (number(p) for p in parts)
        if step <= 0 or stop < start:
            raise ParseError("grid needs step > 0 and stop >= start", 0)
        count = math.floor((stop - start) / step + GRID_SLACK) + 1
        values = [round(start + k * step, 12) for k in range(count)]
        values = [min(v, stop) for v in values]
    else:
        values = [number(p) for p in text.split(",") if p.strip()]
    if not values:
        raise ParseError("empty grid", 0)
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ParseError("grid must be strictly increasing", 0)
    return values


def _rho_arg(text):
    try:
        rho = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid rho {text!r}") from None
    if not -1.0 <= rho <= 1.0:
        raise argparse.ArgumentTypeError(f"rho={rho} outside [-1, 1]")
    return rho


def _grid_arg(text):
    try:
        return parse_grid(text)
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _rho_grid_arg(text):
    grid = _grid_arg(text)
    if any(not -1.0 <= r <= 1.0 for r in grid):
        raise argparse.ArgumentTypeError("rho grid values must lie in [-1, 1]")
    return grid


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return value


def _table_arg(text):
    try:
        return parse_table(text)
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _emit(text, out=None):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt(value):
    return f"{value:.12g}"


def _subset_label(mask, n):
    members = [str(i + 1) for i in range(n) if mask >> i & 1]
    return "S=∅" if not members else "S={" + ",".join(members) + "}"


# --- commands ----------------------------------------------------------------------


def cmd_fourier(args):
    f = args.table
    F = wht(f)
    a = F.bias()
    lines = [f"n={f.n}", f"a = {a} ({float(a):.12g})"]
    masks = sorted(range(1 << f.n), key=lambda m: (bin(m).count("1"), m))
    for mask in masks:
        c = F.coefficient(mask)
        if c:
            lines.append(f"{_subset_label(mask, f.n)}: {c} ({float(c):.12g})")
    _emit("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_mi(args):
    f, g = args.f, args.g
    if f.n != g.n:
        raise DimensionMismatch(f"f has n={f.n}, g has n={g.n}")
    F, G = wht(f), wht(g)
    joint = joint_distribution(F, G, args.rho)
    mi = mutual_information(joint)
    src = source_mi(args.rho)
    value = gap(F, G, args.rho)
    result = {
        "joint": joint.to_dict(),
        "theta": theta_rho(F, G, args.rho),
        "a": float(F.bias()),
        "b": float(G.bias()),
        "mi": mi,
        "source_mi": src,
        "gap": value,
        "rho": args.rho,
        "tolerance": args.tol,
    }
    if args.json:
        _emit(json.dumps(result, indent=2) + "\n")
    else:
        j = joint
        _emit(
            f"joint: pp={_fmt(j.pp)} pm={_fmt(j.pm)} mp={_fmt(j.mp)} mm={_fmt(j.mm)}"
            f"{' (clamped)' if j.clamped else ''}\n"
            f"theta = {_fmt(result['theta'])}\n"
            f"a = {_fmt(result['a'])}\nb = {_fmt(result['b'])}\n"
            f"I(f;g) = {_fmt(mi)}\nI(x;y) = {_fmt(src)}\ngap = {_fmt(value)}\n"
        )
    return EXIT_OK if value >= -args.tol else EXIT_VIOLATION


def cmd_verify(args):
    report = search.verify_theorem(
        args.n,
        args.rho_grid,
        tolerance=args.tol,
        mode=args.mode,
        budget=args.budget,
        seed=args.seed,
        workers=args.workers,
        maximizer_tolerance=args.maximizer_tol,
    )
    if args.out:
        _emit(report.to_json(timing=args.timing), args.out)
    print(report.summary())
    return EXIT_OK if report.passed else EXIT_VIOLATION


def cmd_conjecture(args):
    report = search.verify_conjecture_one_sided(
        args.n, args.rho_grid, tolerance=args.tol, canonical=not args.all
    )
    if args.out:
        _emit(report.to_json(timing=args.timing), args.out)
    print(report.summary())
    return EXIT_OK if report.passed else EXIT_VIOLATION


def _write_csv(header, rows, what, out):
    buf = io.StringIO()
    buf.write(f"# boolcube scan schema={SCHEMA_VERSION} what={what}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else repr(float(v)) for v in row])
    _emit(buf.getvalue(), out)


def cmd_lemma1(args):
    report = bounds.verify_lemma1(args.grid, tolerance=args.tol, workers=args.workers)
    text = json.dumps(report.to_dict(), indent=2) + "\n"
    if args.out:
        _emit(text, args.out)
    if args.csv:
        _write_csv(["alpha", "beta", "rho", "phi"], report.rows, "lemma1", args.csv)
    status = "PASS" if report.passed else "FAIL"
    print(f"{status} cells={report.cells} evaluations={report.evaluations} "
          f"min_phi={report.min_phi:.6e} violations={report.violations} "
          f"certificates_failed={report.certificates_failed}")
    return EXIT_OK if report.passed else EXIT_VIOLATION


def _maybe(func, *a):
    try:
        return func(*a)
    except DomainError:
        return None


def cmd_scan(args):
    if args.what == "gamma":
        xs = parse_grid(args.range or "0.01:0.99:0.01")
        rows = [(x, bounds.gamma_fn(x), bounds.gamma_prime(x)) for x in xs]
        _write_csv(["x", "gamma", "gamma_prime"], rows, "gamma", args.out)
    elif args.what == "phi":
        if args.alpha is None or args.beta is None:
            raise UsageError("scan --what phi needs --alpha and --beta")
        alpha, beta = args.alpha, args.beta
        cap = float(bounds.rho_cap(alpha, beta))
        rhos = parse_grid(args.rho or "0:rmax:0.01", names={"rmax": cap})
        if rhos[-1] < cap - GRID_SLACK and args.rho is None:
            rhos.append(cap)
        p = bounds.p_cubic(alpha, beta) if alpha < beta else None
        rows = []
        for rho in rhos:
            d = _maybe(bounds.phi_derivs, rho, alpha, beta) or (None, None)
            rows.append((alpha, beta, rho, bounds.phi(rho, alpha, beta), d[0], d[1],
                         float(p(rho)) if p is not None else None))
        _write_csv(["alpha", "beta", "rho", "phi", "phi_prime", "phi_second", "p"], rows, "phi", args.out)
    else:
        cs = parse_grid(args.c or "0.05:0.95:0.05")
        xs = parse_grid(args.range or "0.05:0.95:0.05")
        rows = [(c, x, bounds.psi(c, x), bounds.psi_prime(c, x), bounds.psi_second_deriv(c, x))
                for c in cs for x in xs]
        _write_csv(["c", "x", "psi", "psi_prime", "psi_second"], rows, "psi", args.out)
    return EXIT_OK


def cmd_sample(args):
    f, g = args.f, args.g
    if f.n != g.n:
        raise DimensionMismatch(f"f has n={f.n}, g has n={g.n}")
    est = monte_carlo_joint(f, g, args.rho, args.samples, seed=args.seed, workers=args.workers)
    exact = joint_distribution(f, g, args.rho)
    z = {}
    for key, se in zip(("pp", "pm", "mp", "mm"), est.stderr):
        diff = getattr(est.joint, key) - getattr(exact, key)
        z[key] = 0.0 if diff == 0 else (diff / se if se > 0 else math.inf)
    result = est.to_dict()
    result["exact"] = exact.to_dict()
    result["z"] = z
    result["rho"] = args.rho
    _emit(json.dumps(result, indent=2) + "\n", args.out)
    return EXIT_OK


# --- parser ------------------------------------------------------------------------


def build_parser():
    parser = _Parser(prog="boolcube", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fourier", help="print the Fourier expansion of a truth table")
    p.add_argument("table", type=_table_arg, help="truth table as n=K:hex")
    p.set_defaults(func=cmd_fourier)

    p = sub.add_parser("mi", help="mutual information of one pair")
    p.add_argument("f", type=_table_arg)
    p.add_argument("g", type=_table_arg)
    p.add_argument("--rho", type=_rho_arg, required=True)
    p.add_argument("--tol", type=_positive_float, default=TOL)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_mi)

    workers = default_workers()

    p = sub.add_parser("verify", help="scan all pairs at small n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rho-grid", type=_rho_grid_arg, default=parse_grid("0.05:0.95:0.05"))
    p.add_argument("--mode", choices=sorted(search.MODE_LIMITS), default="exhaustive")
    p.add_argument("--tol", type=_positive_float, default=TOL)
    p.add_argument("--maximizer-tol", type=_positive_float, default=search.MAXIMIZER_TOL)
    p.add_argument("--workers", type=int, default=workers)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--timing", action="store_true",
                   help="add elapsed_ms and workers to the report (breaks byte-reproducibility)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("conjecture", help="one-sided check I(f(X); Y) <= I(x; y)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rho-grid", type=_rho_grid_arg, default=parse_grid("0.05:0.95:0.05"))
    p.add_argument("--tol", type=_positive_float, default=TOL)
    p.add_argument("--all", action="store_true", help="scan every function, not one per orbit")
    p.add_argument("--out")
    p.add_argument("--timing", action="store_true")
    p.set_defaults(func=cmd_conjecture)

    p = sub.add_parser("lemma1", help="grid certificate for the two-variable inequality")
    p.add_argument("--grid", type=bounds.GridSpec.parse, default=bounds.GridSpec())
    p.add_argument("--tol", type=_positive_float, default=TOL)
    p.add_argument("--workers", type=int, default=workers)
    p.add_argument("--out")
    p.add_argument("--csv")
    p.set_defaults(func=cmd_lemma1)

    p = sub.add_parser("scan", help="CSV scans of phi, psi or gamma")
    p.add_argument("--what", choices=["phi", "psi", "gamma"], required=True)
    p.add_argument("--range", help="x grid for gamma and psi")
    p.add_argument("--c", help="c grid for psi")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--rho", help="rho grid for phi; the token rmax is the admissible cap")
    p.add_argument("--out")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("sample", help="Monte Carlo estimate of the joint law")
    p.add_argument("f", type=_table_arg)
    p.add_argument("g", type=_table_arg)
    p.add_argument("--rho", type=_rho_arg, required=True)
    p.add_argument("--samples", type=lambda s: int(float(s)), default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=workers)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NonDictatorMaximizer as exc:
        print(f"boolcube: internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except NumericalInconsistency as exc:
        print(f"boolcube: internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (UsageError, ParseError, DomainError, DimensionMismatch, DimensionTooLarge,
            BudgetExceeded) as exc:
        print(f"boolcube: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BoolcubeError as exc:
        print(f"boolcube: internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
