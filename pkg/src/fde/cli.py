"""Command-line interface: solve, converge, verify, validate-kernel."""

from __future__ import annotations

import argparse
import csv
import logging
import sys

import numpy as np

from . import __version__
from .errors import FdeError, NoConvergence, NonFiniteIterate
from .harness import (
    STRICT_POLICY,
    STUDY_TOL,
    ConvergenceStudy,
    StudyRow,
    TolerancePolicy,
    emit_comparison,
    emit_table,
    run_convergence,
    verify_table,
)
from .kernels import validate_kernel
from .problems import resolve
from .quadrature import OFFGRID_JUMPS, Level
from .reference import TABLE_IDS
from .solver import SolverConfig, solve

EXIT_OK, EXIT_COMPARISON, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2, 3

METHODS = {"p4": Level.P2, "p6": Level.P3, "p8": Level.P4}


def _ladder(text: str) -> list:
    try:
        ladder = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad ladder {text!r}") from None
    if not ladder:
        raise argparse.ArgumentTypeError("empty ladder")
    return ladder


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fde", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--problem", required=True, help="built-in name (ex4_1 ... ex7_2) or path to a .fde file")
        p.add_argument("--method", required=True, choices=sorted(METHODS))
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--max-iter", type=int, default=200)
        p.add_argument("--out", choices=("csv", "markdown"), default="markdown")
        p.add_argument("--offgrid-jump", choices=OFFGRID_JUMPS, default="standard")

    p = sub.add_parser("solve", help="solve one problem on one grid")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dump-solution", metavar="PATH")

    p = sub.add_parser("converge", help="run a grid ladder and report observed orders")
    common(p)
    p.add_argument("--ladder", type=_ladder, required=True)

    p = sub.add_parser("verify", help="reproduce a reference table")
    p.add_argument("--table", required=True, help=f"one of {', '.join(TABLE_IDS)} (or a source label)")
    p.add_argument("--strict", action="store_true", help="1%% relative tolerance and exact iteration counts")
    p.add_argument("--offgrid-jump", choices=OFFGRID_JUMPS, default="standard")

    p = sub.add_parser("validate-kernel", help="run the residual oracle for a kernel")
    p.add_argument("--order", type=int, required=True, choices=(3, 4, 5))
    p.add_argument("--family", required=True)
    return parser


def _dump_solution(path: str, report, problem):
    t = report.nodes
    exact = None if problem.exact is None else np.broadcast_to(np.asarray(problem.exact(t), dtype=float), t.shape)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "U"] + (["exact", "error"] if exact is not None else []))
        for i, ti in enumerate(t):
            row = [repr(float(ti)), repr(float(report.U.values[i]))]
            if exact is not None:
                row += [repr(float(exact[i])), repr(abs(float(report.U.values[i] - exact[i])))]
            writer.writerow(row)


def cmd_solve(args) -> int:
    problem = resolve(args.problem)
    config = SolverConfig(
        level=METHODS[args.method], n=args.n, tol=args.tol or 1e-14, max_iter=args.max_iter,
        offgrid_jump=args.offgrid_jump,
    )
    report = solve(problem, config)
    if args.dump_solution:
        _dump_solution(args.dump_solution, report, problem)
    study = ConvergenceStudy(problem.name, config.level, [StudyRow(args.n, report.iterations, report.max_error)])
    sys.stdout.write(emit_table(study, args.out))
    if report.roundoff_stall:
        print("note: stopped on roundoff stall", file=sys.stderr)
    if "q" in report.diagnostics:
        d = report.diagnostics
        print(f"contraction: q = {d['q']:.4g} ({'satisfied' if d['satisfied'] else 'NOT satisfied'}), M0 = {d['M0']:.6g}",
              file=sys.stderr)
    return EXIT_OK


def cmd_converge(args) -> int:
    problem = resolve(args.problem)
    study = run_convergence(
        problem, METHODS[args.method], args.ladder, tol=args.tol or STUDY_TOL, max_iter=args.max_iter,
        offgrid_jump=args.offgrid_jump,
    )
    sys.stdout.write(emit_table(study, args.out))
    for row in study.rows:
        if row.failure:
            print(f"n={row.n}: {row.failure}", file=sys.stderr)
    return EXIT_OK if study.ok else EXIT_SOLVER


def cmd_verify(args) -> int:
    policy = STRICT_POLICY if args.strict else TolerancePolicy()
    study, report = verify_table(args.table, policy, offgrid_jump=args.offgrid_jump)
    sys.stdout.write(emit_table(study, "markdown"))
    sys.stdout.write(emit_comparison(report))
    if not study.ok:
        return EXIT_SOLVER
    return EXIT_OK if report.passed else EXIT_COMPARISON


def cmd_validate_kernel(args) -> int:
    result = validate_kernel(args.order, args.family)
    for key, value in result.items():
        print(f"{key}: {value}")
    return EXIT_OK if result["passed"] else EXIT_COMPARISON


COMMANDS = {
    "solve": cmd_solve,
    "converge": cmd_converge,
    "verify": cmd_verify,
    "validate-kernel": cmd_validate_kernel,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (KeyError, ValueError, FdeError) as exc:
        # solver failures get their own exit code; everything else is bad input
        print(f"fde: {exc}", file=sys.stderr)
        if isinstance(exc, (NoConvergence, NonFiniteIterate)):
            return EXIT_SOLVER
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
