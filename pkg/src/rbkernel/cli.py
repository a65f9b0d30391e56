"""Command-line interface.

Every capability of the library is exposed as a subcommand with
machine-readable output so the whole verification is reproducible from a
shell.  Tabular subcommands (p-scan, sweep, identity-check) default to CSV
with a fixed header; scalar subcommands (gamma, kernel-eval, find-root)
default to compact JSON.  Identical invocations produce byte-identical
output.

Exit codes: 0 success (or verification pass), 1 verification failure,
2 usage or domain error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import counterexample as cx
from .kernel import eval_kernel, solve_gamma, validate_sets
from .operator import (
    DEFAULT_SPECTRAL_GRADING,
    DEFAULT_SPECTRAL_NODES,
    DEFAULT_SPECTRAL_PANELS,
    ConvergenceError,
    apply_operator,
    sweep,
)
from .report import ScanReport, fmt_float
from .riccati import eval_regular

__all__ = ["main", "build_parser"]


def _parse_set(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed set {text!r}; expected comma-separated numerals")


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def _emit_scalars(pairs: list[tuple[str, object]], args) -> None:
    """Write name/value pairs as one JSON object or a one-row CSV."""
    if args.format == "json":
        _emit(json.dumps(dict(pairs), separators=(",", ":")) + "\n", args.output)
    else:
        names = ",".join(name for name, _ in pairs)
        cells = ",".join(
            fmt_float(v) if isinstance(v, float) else str(v) for _, v in pairs
        )
        _emit(names + "\n" + cells + "\n", args.output)


def _emit_report(report: ScanReport, args) -> None:
    text = report.to_csv_text() if args.format == "csv" else report.to_json_text()
    _emit(text, args.output)
    for point, message in report.failures:
        print(f"warning: point {point:g} failed: {message}", file=sys.stderr)


def _add_io(parser, default_format: str) -> None:
    parser.add_argument("--format", choices=("csv", "json"), default=default_format,
                        help=f"output format (default {default_format})")
    parser.add_argument("--output", "-o", default=None, metavar="PATH",
                        help="write to PATH instead of stdout")


def _add_sets(parser) -> None:
    parser.add_argument("--s", type=_parse_set, default=[0.0], metavar="LIST",
                        help="index set S, comma-separated (default 0)")
    parser.add_argument("--t", type=_parse_set, default=[2.0], metavar="LIST",
                        help="index set T, comma-separated (default 2)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rbkernel",
        description="Degenerate Riccati-Bessel kernel toolkit: coefficients, "
                    "operator spectra, and the nontrivial-solution verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gamma", help="solve the coefficient equation for gamma")
    _add_sets(p)
    _add_io(p, "json")

    p = sub.add_parser("kernel-eval", help="evaluate the kernel g(s, t)")
    _add_sets(p)
    p.add_argument("--eval-s", type=float, required=True, metavar="S")
    p.add_argument("--eval-t", type=float, required=True, metavar="T")
    _add_io(p, "json")

    p = sub.add_parser("p-scan", help="tabulate p(r) over a radius range")
    p.add_argument("--r-min", type=float, required=True)
    p.add_argument("--r-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=101)
    p.add_argument("--route", choices=("auto", "explicit", "wronskian", "series"),
                   default="auto", help="evaluation route (auto = explicit with "
                   "its small-radius series guard)")
    _add_io(p, "csv")

    p = sub.add_parser("find-root", help="locate a root of p in a bracket")
    p.add_argument("--lo", type=float, default=cx.DEFAULT_BRACKET[0])
    p.add_argument("--hi", type=float, default=cx.DEFAULT_BRACKET[1])
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--route", choices=("explicit", "wronskian"), default="explicit")
    _add_io(p, "json")

    p = sub.add_parser("identity-check",
                       help="tabulate the integration-by-parts identity residual")
    p.add_argument("--r", type=float, default=None,
                   help="radius (default: the root R of p)")
    p.add_argument("--points", type=int, default=20)
    p.add_argument("--tol", type=float, default=1e-10,
                   help="quadrature tolerance per integral")
    _add_io(p, "csv")

    p = sub.add_parser("sweep", help="tabulate sigma_min(I - A) over radii")
    _add_sets(p)
    p.add_argument("--r-min", type=float, required=True)
    p.add_argument("--r-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=11)
    p.add_argument("--panels", type=int, default=8)
    p.add_argument("--nodes", type=int, default=12)
    p.add_argument("--grading", type=float, default=2.0)
    p.add_argument("--refine", action="store_true",
                   help="redo each radius at doubled panels and record the change")
    _add_io(p, "csv")

    p = sub.add_parser("verify",
                       help="run the full nontrivial-solution verification")
    p.add_argument("--panels", type=int, default=DEFAULT_SPECTRAL_PANELS,
                   help="spectral grid panels (default %(default)s)")
    p.add_argument("--nodes", type=int, default=DEFAULT_SPECTRAL_NODES,
                   help="spectral grid nodes per panel (default %(default)s)")
    p.add_argument("--grading", type=float, default=DEFAULT_SPECTRAL_GRADING,
                   help="spectral grid grading exponent (default %(default)s)")
    p.add_argument("--force-r", type=float, default=None,
                   help="use this radius instead of the root R (for exploring "
                   "how the verification fails away from the root)")
    p.add_argument("--tol-gamma", type=float, default=cx.Tolerances.gamma)
    p.add_argument("--tol-identity", type=float, default=cx.Tolerances.identity)
    p.add_argument("--tol-equation", type=float, default=cx.Tolerances.equation)
    p.add_argument("--tol-sigma", type=float, default=cx.Tolerances.sigma)
    p.add_argument("--tol-root", type=float, default=cx.Tolerances.root)
    p.add_argument("--output", "-o", default=None, metavar="PATH",
                   help="also write the full JSON report to PATH")
    p.add_argument("--dump-matrix", default=None, metavar="PATH",
                   help="debug: dump the spectral Nystrom matrix as CSV")

    return parser


def _cmd_gamma(args) -> int:
    spec = solve_gamma(validate_sets(args.s, args.t))
    if args.format == "json":
        _emit(json.dumps({"gamma": list(spec.gamma)}, separators=(",", ":")) + "\n",
              args.output)
    else:
        lines = ["gamma"] + [fmt_float(g) for g in spec.gamma]
        _emit("\n".join(lines) + "\n", args.output)
    return 0


def _cmd_kernel_eval(args) -> int:
    spec = solve_gamma(validate_sets(args.s, args.t))
    value = eval_kernel(spec, args.eval_s, args.eval_t)
    _emit_scalars([("s", args.eval_s), ("t", args.eval_t), ("value", value)], args)
    return 0


def _cmd_p_scan(args) -> int:
    route = {"auto": cx.p_explicit, "explicit": cx.p_explicit,
             "wronskian": cx.p_wronskian, "series": cx.p_series}[args.route]
    if args.steps < 2:
        raise ValueError("steps must be >= 2")
    if not 0.0 < args.r_min < args.r_max:
        raise ValueError("need 0 < r-min < r-max")
    rows = [(float(r), route(float(r)).value)
            for r in np.linspace(args.r_min, args.r_max, args.steps)]
    _emit_report(ScanReport(columns=("r", "p"), rows=rows), args)
    return 0


def _cmd_find_root(args) -> int:
    result = cx.find_root(args.lo, args.hi, tol=args.tol, route=args.route)
    if args.format == "json":
        payload = {
            "R": result.root,
            "bracket": list(result.bracket),
            "residual": result.residual,
            "iterations": result.iterations,
        }
        _emit(json.dumps(payload, separators=(",", ":")) + "\n", args.output)
    else:
        _emit_scalars(
            [("R", result.root), ("residual", result.residual),
             ("iterations", result.iterations),
             ("bracket_lo", result.bracket[0]), ("bracket_hi", result.bracket[1])],
            args,
        )
    return 0


def _cmd_identity_check(args) -> int:
    r = args.r if args.r is not None else cx.find_root(*cx.DEFAULT_BRACKET).root
    if args.points < 1:
        raise ValueError("points must be >= 1")
    spec = cx.reference_spec()
    p_r = cx.p_explicit(r).value
    rows = []
    for s in np.linspace(r / args.points, r, args.points):
        s = float(s)
        j = apply_operator(spec, r, lambda t: eval_regular(2, t).value, s,
                           tol=args.tol)
        rhs = eval_regular(2, s).value + p_r * eval_regular(0, s).value
        rows.append((s, j, rhs, abs(j - rhs)))
    _emit_report(
        ScanReport(columns=("s", "J", "identity_rhs", "residual"), rows=rows), args
    )
    return 0


def _cmd_sweep(args) -> int:
    spec = solve_gamma(validate_sets(args.s, args.t))
    report = sweep(
        spec, args.r_min, args.r_max, args.steps,
        panels_count=args.panels, nodes_per_panel=args.nodes,
        grading=args.grading, refine=args.refine,
    )
    _emit_report(report, args)
    return 0


def _cmd_verify(args) -> int:
    tolerances = cx.Tolerances(
        gamma=args.tol_gamma, identity=args.tol_identity,
        equation=args.tol_equation, sigma=args.tol_sigma, root=args.tol_root,
    )
    report = cx.verify_counterexample(
        tolerances=tolerances,
        r_override=args.force_r,
        spectral_panels=args.panels if args.panels != DEFAULT_SPECTRAL_PANELS else None,
        spectral_nodes=args.nodes if args.nodes != DEFAULT_SPECTRAL_NODES else None,
        spectral_grading=args.grading if args.grading != DEFAULT_SPECTRAL_GRADING else None,
    )
    sys.stdout.write(report.summary_text())
    if args.output is not None:
        Path(args.output).write_text(report.to_json_text())
    if args.dump_matrix is not None:
        from .operator import build_grid, dump_matrix, nystrom_matrix

        grid = build_grid(report.r_used, panels_count=args.panels,
                          nodes_per_panel=args.nodes, grading=args.grading)
        dump_matrix(nystrom_matrix(cx.reference_spec(), grid), args.dump_matrix)
    return 0 if report.passed else 1


_COMMANDS = {
    "gamma": _cmd_gamma,
    "kernel-eval": _cmd_kernel_eval,
    "p-scan": _cmd_p_scan,
    "find-root": _cmd_find_root,
    "identity-check": _cmd_identity_check,
    "sweep": _cmd_sweep,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OverflowError, ArithmeticError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
