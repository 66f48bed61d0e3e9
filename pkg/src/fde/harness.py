"""Convergence studies over grid ladders and comparison with reference tables."""

from __future__ import annotations

import csv
import io
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .errors import FdeError
from .problems import builtin
from .quadrature import Level
from .reference import ReferenceTable, get_table
from .solver import BvpProblem, SolverConfig, solve

log = logging.getLogger(__name__)

STUDY_TOL = 1e-16  # the stopping tolerance used for the published tables


@dataclass
class StudyRow:
    n: int
    K: Optional[int] = None
    E: Optional[float] = None
    elapsed: float = 0.0
    order: Optional[float] = None
    roundoff_stall: bool = False
    failure: Optional[str] = None


@dataclass
class ConvergenceStudy:
    problem: str
    level: Level
    rows: list = field(default_factory=list)

    def row(self, n: int) -> StudyRow:
        for r in self.rows:
            if r.n == n:
                return r
        raise KeyError(n)

    @property
    def ok(self) -> bool:
        return all(r.failure is None for r in self.rows)


def _is_doubling_chain(prev: int, n: int) -> bool:
    ratio = n / prev
    return ratio > 1 and float(ratio).is_integer() and (int(ratio) & (int(ratio) - 1)) == 0


def observed_orders(rows: list) -> None:
    """Fill ``order`` for rungs whose predecessor is a power-of-two coarsening."""
    for prev, cur in zip(rows, rows[1:]):
        cur.order = None
        if prev.E and cur.E and _is_doubling_chain(prev.n, cur.n):
            cur.order = math.log(prev.E / cur.E) / math.log(cur.n / prev.n)


def _thread_count() -> int:
    raw = os.environ.get("FDE_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            log.warning("ignoring FDE_THREADS=%r", raw)
    return min(4, os.cpu_count() or 1)


def _run_rung(problem: BvpProblem, level, n: int, tol: float, max_iter: int, offgrid_jump: str) -> StudyRow:
    start = time.perf_counter()
    try:
        report = solve(problem, SolverConfig(level=level, n=n, tol=tol, max_iter=max_iter, offgrid_jump=offgrid_jump))
    except (FdeError, ValueError) as exc:
        return StudyRow(n, elapsed=time.perf_counter() - start, failure=f"{type(exc).__name__}: {exc}")
    return StudyRow(
        n,
        K=report.iterations,
        E=report.max_error,
        elapsed=time.perf_counter() - start,
        roundoff_stall=report.roundoff_stall,
    )


def run_convergence(
    problem,
    level,
    ladder,
    tol: float = STUDY_TOL,
    max_iter: int = 200,
    offgrid_jump: str = "standard",
    threads: Optional[int] = None,
) -> ConvergenceStudy:
    """Solve on every n of ``ladder``; rungs run concurrently, rows come back ordered by n."""
    if isinstance(problem, str):
        problem = builtin(problem)
    level = Level.parse(level)
    ladder = [int(n) for n in ladder]
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ValueError("ladder must be strictly increasing")
    workers = threads or _thread_count()
    if workers > 1 and len(ladder) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda n: _run_rung(problem, level, n, tol, max_iter, offgrid_jump), ladder))
    else:
        rows = [_run_rung(problem, level, n, tol, max_iter, offgrid_jump) for n in ladder]
    observed_orders(rows)
    return ConvergenceStudy(problem.name, level, rows)


# --- comparison with reference data -------------------------------------------


@dataclass(frozen=True)
class TolerancePolicy:
    relative: float = 0.05
    machine_cutoff: float = 1e-12
    machine_factor: float = 5.0
    machine_floor: float = 5e-13
    iterations: int = 2
    check_iterations: bool = True
    check_orders: bool = True

    def error_ok(self, ref: float, got: float) -> bool:
        if got is None or not math.isfinite(got):
            return False
        if ref >= self.machine_cutoff:
            return abs(got - ref) / ref <= self.relative
        return got <= max(self.machine_factor * ref, self.machine_floor)


STRICT_POLICY = TolerancePolicy(relative=0.01, iterations=0)


@dataclass(frozen=True)
class CellVerdict:
    n: int
    column: str  # "E", "K" or "order"
    reference: Optional[float]
    computed: Optional[float]
    passed: bool
    note: str = ""


@dataclass
class ComparisonReport:
    table_id: str
    cells: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cells)

    @property
    def failures(self) -> list:
        return [c for c in self.cells if not c.passed]


class TableMismatch(FdeError, ValueError):
    pass


def compare_reference(study: ConvergenceStudy, table, policy: TolerancePolicy | None = None) -> ComparisonReport:
    """Cell-by-cell verdicts of ``study`` against a reference table."""
    table = table if isinstance(table, ReferenceTable) else get_table(table)
    policy = policy or TolerancePolicy()
    if study.problem != table.problem or study.level != table.level:
        raise TableMismatch(
            f"{table.table_id} is for {table.problem} at level {table.level.name}, "
            f"study is {study.problem or '<unnamed>'} at level {study.level.name}"
        )
    cells = []
    for ref in table.rows:
        try:
            got = study.row(ref.n)
        except KeyError:
            cells.append(CellVerdict(ref.n, "E", ref.E, None, False, "rung not run"))
            continue
        if got.failure:
            cells.append(CellVerdict(ref.n, "E", ref.E, None, False, got.failure))
            continue
        bucket = "machine" if ref.E < policy.machine_cutoff else "relative"
        cells.append(CellVerdict(ref.n, "E", ref.E, got.E, policy.error_ok(ref.E, got.E), bucket))
        if policy.check_iterations and ref.K is not None:
            cells.append(CellVerdict(ref.n, "K", ref.K, got.K, abs(got.K - ref.K) <= policy.iterations))
        if policy.check_orders and ref.order is not None:
            prev = table.rows[table.rows.index(ref) - 1]
            if min(prev.E, ref.E) < policy.machine_cutoff:
                continue  # orders between roundoff-level cells are not meaningful
            ok = got.order is not None and abs(got.order - ref.order) <= table.order_tol
            cells.append(CellVerdict(ref.n, "order", ref.order, got.order, ok, f"±{table.order_tol}"))
    return ComparisonReport(table.table_id, cells)


def verify_table(table_id: str, policy: TolerancePolicy | None = None, **kwargs):
    table = get_table(table_id)
    study = run_convergence(table.problem, table.level, table.ladder, **kwargs)
    return study, compare_reference(study, table, policy)


# --- output ---------------------------------------------------------------------

COLUMNS = ("n", "K", "E", "order")


def _fmt(row: StudyRow) -> list:
    return [
        str(row.n),
        "" if row.K is None else str(row.K),
        "" if row.E is None else f"{row.E:.4e}",
        "" if row.order is None else f"{row.order:.4f}",
    ]


def emit_table(study: ConvergenceStudy, fmt: str = "markdown") -> str:
    rows = [_fmt(r) for r in study.rows]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        writer.writerows(rows)
        return buf.getvalue()
    if fmt != "markdown":
        raise ValueError(f"unknown format {fmt!r}")
    lines = ["| " + " | ".join(COLUMNS) + " |", "|" + "---|" * len(COLUMNS)]
    lines += ["| " + " | ".join(r) + " |" for r in rows]
    return "\n".join(lines) + "\n"


def emit_comparison(report: ComparisonReport) -> str:
    lines = [f"{report.table_id}: {'PASS' if report.passed else 'FAIL'}"]
    for c in report.cells:
        ref = "-" if c.reference is None else (f"{c.reference:.4e}" if c.column == "E" else f"{c.reference:g}")
        if c.computed is None:
            got = "-"
        elif c.column == "E":
            got = f"{c.computed:.4e}"
        elif c.column == "order":
            got = f"{c.computed:.4f}"
        else:
            got = f"{c.computed:g}"
        mark = "ok  " if c.passed else "FAIL"
        lines.append(f"  {mark} n={c.n:<5d} {c.column:<5s} ref={ref:<11s} got={got:<11s} {c.note}")
    return "\n".join(lines) + "\n"
