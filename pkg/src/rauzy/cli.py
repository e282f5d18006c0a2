"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 budget exceeded.
Human summaries go to stdout, diagnostics to stderr, machine output to files.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import render, renewal, reporting, verify
from .enumeration import DEFAULT_BUDGET, EXACT, BudgetExceededError, DeltaMode, x_series

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


def _kmax(text: str) -> int:
    value = float(text)
    if value != int(value) or value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return int(value)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rauzy", description="Certified dimension bounds for Rauzy gaskets.")
    parser.add_argument("--threads", type=int, default=None, help="worker cap (fallback: RAUZY_THREADS)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="bisect delta for a certified Hausdorff dimension bound")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--tol", type=float, default=renewal.DEFAULT_TOL)
    p.add_argument("--kmax", type=_kmax, default=renewal.DEFAULT_K)
    p.add_argument("--exact-k", type=int, default=3, help="truncation for the exact delta=1 certificate")
    p.add_argument("--json", type=Path)

    p = sub.add_parser("xsum", help="tabulate X_n and X_{n,1}")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--n", type=int, required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--delta", type=float)
    mode.add_argument("--exact", action="store_true")
    p.add_argument("--csv", type=Path)
    p.add_argument("--json", type=Path)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", choices=["all", *verify.SUITES], default="all")
    p.add_argument("--n-max", type=int)
    p.add_argument("--json", type=Path)

    p = sub.add_parser("render", help="draw the d=3 gasket")
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--min-volume", type=_fraction, default=Fraction(0))
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--format", choices=["svg", "ppm"], default="svg")
    p.add_argument("--size", type=int, default=None)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    p = sub.add_parser("boxdim", help="box-counting estimate on a sampled point cloud")
    p.add_argument("--points", type=_kmax, default=10**6)
    p.add_argument("--kmin", type=int, default=4)
    p.add_argument("--kmax", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--word-len", type=int, default=40)
    p.add_argument("--scheme", choices=["words", "orbit"], default="words")
    p.add_argument("--burn-in", type=int, default=0)
    p.add_argument("--json", type=Path)

    for p in sub.choices.values():
        p.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker cap (fallback: RAUZY_THREADS)")
    return parser


def _write(path: Path | None, text: str) -> None:
    if path is not None:
        path.write_text(text, encoding="utf-8")


def cmd_bound(args) -> int:
    result = renewal.min_delta(args.d, tol=args.tol, K=args.kmax)
    cert = renewal.criterion_sum(args.d, EXACT, args.exact_k)
    params = {"d": args.d, "tol": args.tol, "kmax": args.kmax, "exact_k": args.exact_k}
    _write(args.json, reporting.dumps(reporting.bound_document(result, cert, params)))
    print(f"d = {args.d}: delta* = {result.delta_star:.10f}, dim_H <= {result.dim_upper_bound:.10f}")
    print(
        f"exact delta=1 certificate (K = {args.exact_k}): "
        f"{reporting.frac_str(cert.upper_bound)} ~ {float(cert.upper_bound):.6f} < 1: {cert.verdict}"
    )
    return EXIT_OK if result.final_report.verdict and cert.verdict else EXIT_FAILED


def cmd_xsum(args) -> int:
    delta = DeltaMode(args.delta) if args.delta is not None else EXACT
    rows = x_series(args.d, args.n, delta, budget=args.budget, workers=args.threads)
    params = {"d": args.d, "n": args.n, "delta": "exact" if delta.exact else delta.delta, "budget": args.budget}
    _write(args.csv, reporting.xsum_csv(rows))
    _write(args.json, reporting.dumps(reporting.xsum_document(rows, params)))
    for r in rows:
        label = f"X_{r.n}" if r.k is None else f"X_{{{r.n},{r.k}}}"
        text = reporting.frac_str(r.value) if delta.exact else repr(r.value)
        print(f"{label} = {text} ({float(r.value):.12g}; {r.word_count} words)")
    return EXIT_OK


def cmd_verify(args) -> int:
    reports = verify.run_suite(args.suite, n_max=args.n_max, workers=args.threads)
    params = {"suite": args.suite, "n_max": args.n_max}
    _write(args.json, reporting.dumps(reporting.check_documents(reports, params)))
    for r in reports:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name} {r.parameters}")
        if not r.passed:
            print(f"  witness: {r.witness}", file=sys.stderr)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def cmd_render(args) -> int:
    leaves = render.subdivide(args.depth, args.min_volume, budget=args.budget)
    triangles = [render.triangle_of(s) for _, s in leaves]
    if args.format == "svg":
        style = render.Style(size=args.size or 1024)
        render.write_svg(triangles, args.out, style)
    else:
        render.write_ppm(render.rasterize(triangles, size=args.size or render.DEFAULT_RASTER), args.out)
    print(f"wrote {len(triangles)} triangles to {args.out}")
    return EXIT_OK


def cmd_boxdim(args) -> int:
    cloud = render.chaos_game(args.points + args.burn_in, args.burn_in, args.seed, args.word_len, args.scheme)
    slope = render.box_count(cloud, args.kmin, args.kmax)
    counts = render.box_counts(cloud.points, range(args.kmin, args.kmax + 1))
    params = {
        "points": args.points,
        "kmin": args.kmin,
        "kmax": args.kmax,
        "seed": args.seed,
        "word_len": args.word_len,
        "scheme": args.scheme,
        "burn_in": args.burn_in,
    }
    doc = {"schema": reporting.SCHEMA_VERSION, "kind": "boxdim", "parameters": params, "slope": slope, "counts": counts}
    _write(args.json, reporting.dumps(doc))
    print(f"box-counting slope over k = {args.kmin}..{args.kmax}: {slope:.6f}")
    return EXIT_OK


COMMANDS = {"bound": cmd_bound, "xsum": cmd_xsum, "verify": cmd_verify, "render": cmd_render, "boxdim": cmd_boxdim}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except renewal.NoCertificateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
