"""Benchmark harness over the uniform cell family.

A sweep builds one row per (m, p) cell: the proven optimal cycle time,
the big-M constant, and per formulation the LP relaxation value plus the
integer solve's objective, wall seconds, and node count.  Relaxation
values come from the plain models; the integer solves run on the
cut-strengthened models with a canonical-order incumbent, which proves
the same optimum far faster.

Integer solves run under a node budget plus a wall cap.  Cells that
prove finish in one node, far under both; cells with a real root gap
exhaust whichever budget hits first and are recorded as limited, and
the sweep continues.  Reruns of a sweep produce identical rows except
for the seconds columns.

Checking compares each row against the embedded reference table: the
optimal cycle time and big-M exactly, the flow relaxation within
FLOW_LPR_TOL.  The MTZ and step-model relaxation columns are reported
for the reader but never gate the check (see the acceptance suite for
the diagnostic treatment of those two columns).
"""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .cell import CellInstance, big_m, canonical_order
from .engine.branch_bound import BnbOptions, solve_lp_relaxation, solve_milp, warm_start
from .exact import SearchOptions, solve_exact
from .milp.formulations import build_model
from .tables import BENCH_DELTA, BENCH_EPSILON, ExpectedCell, expected_cell

__all__ = [
    "BenchConfig",
    "BenchRow",
    "CSV_COLUMNS",
    "FLOW_LPR_TOL",
    "MethodCell",
    "emit_plot_data",
    "render_csv",
    "render_markdown",
    "run_benchmark",
]

METHODS = ("mtz", "vajda", "flow", "enum")
MILP_METHODS = ("mtz", "vajda", "flow")
FLOW_LPR_TOL = 1e-3

CSV_COLUMNS = [
    "m", "p", "c_opt", "big_m",
    "mtz_lpr", "mtz_obj", "mtz_s",
    "vajda_lpr", "vajda_obj", "vajda_s",
    "flow_lpr", "flow_obj", "flow_s",
    "enum_c", "enum_s", "verdict",
]


@dataclass(frozen=True)
class BenchConfig:
    """One sweep: which cells to run and under which budgets."""

    m_values: tuple = (4, 5, 6)
    p_values: tuple = tuple(range(0, 251, 25))
    methods: tuple = METHODS
    epsilon: float = BENCH_EPSILON
    delta: float = BENCH_DELTA
    check: bool = False
    long: bool = False  # lift the m >= 6 exhaustive-search gate
    force: bool = False  # allow m outside 1..6
    workers: int = 1
    enum_nodes: int = 300_000_000
    milp_nodes: int = 300
    time_limit: Optional[float] = 20.0  # wall seconds per integer solve
    progress: Optional[object] = None  # callable(BenchRow), from workers

    def __post_init__(self) -> None:
        if not self.methods:
            raise ValueError("empty method selection")
        bad = [x for x in self.methods if x not in METHODS]
        if bad:
            raise ValueError(f"unknown methods: {', '.join(bad)}")
        if not self.force:
            out = [m for m in self.m_values if not 1 <= m <= 6]
            if out:
                raise ValueError(
                    f"m={out[0]} outside 1..6; pass force to run it anyway")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class MethodCell:
    """One method's outcome on one cell."""

    lpr: Optional[float] = None
    objective: Optional[float] = None
    seconds: Optional[float] = None
    nodes: Optional[int] = None
    status: str = "skipped"  # "optimal" | "limit" | "skipped"


@dataclass
class BenchRow:
    m: int
    p: int
    c_opt: Optional[float]
    big_m: float
    mtz: MethodCell
    vajda: MethodCell
    flow: MethodCell
    enum: MethodCell
    verdict: str = ""
    diagnostics: dict = field(default_factory=dict)

    def cell(self, method: str) -> MethodCell:
        return getattr(self, method)


def _solve_formulation(inst: CellInstance, form: str, config: BenchConfig,
                       incumbent_order) -> MethodCell:
    out = MethodCell()
    plain = build_model(inst, form)
    rel = solve_lp_relaxation(plain)
    if rel.status == "optimal":
        out.lpr = rel.objective
    strong = build_model(inst, form, cuts=True)
    incumbent = warm_start(strong, incumbent_order)
    opts = BnbOptions(node_limit=config.milp_nodes,
                      time_limit=config.time_limit)
    t0 = time.perf_counter()
    sol = solve_milp(strong, options=opts, incumbent=incumbent)
    out.seconds = time.perf_counter() - t0
    out.nodes = sol.nodes
    out.status = sol.status if sol.status in ("optimal", "limit") else "limit"
    if sol.status == "optimal":
        out.objective = sol.objective
    return out


def _solve_cell(config: BenchConfig, m: int, p) -> BenchRow:
    inst = CellInstance.uniform(m, config.epsilon, config.delta, p)
    row = BenchRow(m=m, p=p, c_opt=None, big_m=float(big_m(inst)),
                   mtz=MethodCell(), vajda=MethodCell(), flow=MethodCell(),
                   enum=MethodCell())

    enum_gated = m >= 6 and not config.long
    incumbent_order = canonical_order(m)
    if not enum_gated:
        # the exhaustive search is the authoritative optimum prover,
        # and its order seeds the integer solves with a tight incumbent
        opts = SearchOptions(node_limit=config.enum_nodes, partial=True)
        t0 = time.perf_counter()
        res = solve_exact(inst, opts)
        seconds = time.perf_counter() - t0
        status = "optimal" if res.proven else "limit"
        if res.proven:
            row.c_opt = float(res.cycle_time)
            incumbent_order = res.order
        if "enum" in config.methods:
            row.enum = MethodCell(
                objective=row.c_opt, seconds=seconds,
                nodes=res.nodes, status=status)

    for form in MILP_METHODS:
        if form in config.methods:
            setattr(row, form,
                    _solve_formulation(inst, form, config, incumbent_order))

    if row.c_opt is None:
        # gated or budget-bound: fall back to any proven integer optimum
        proven = [row.cell(f).objective for f in MILP_METHODS
                  if f in config.methods and row.cell(f).status == "optimal"]
        if proven:
            row.c_opt = proven[0]

    if config.check:
        row.diagnostics = _lpr_diagnostics(inst, config)
    row.verdict = _verdict(row, config)
    if config.progress is not None:
        config.progress(row)
    return row


def _lpr_diagnostics(inst: CellInstance, config: BenchConfig) -> dict:
    """Waits-variant relaxations, reported next to the base ones."""
    diag = {}
    for form in ("mtz", "vajda"):
        if form in config.methods:
            rel = solve_lp_relaxation(build_model(inst, form, variant="waits"))
            if rel.status == "optimal":
                diag[f"{form}_lpr_waits"] = rel.objective
    return diag


def _close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol


def _verdict(row: BenchRow, config: BenchConfig) -> str:
    exp = expected_cell(row.m, row.p)
    if exp is None:
        return ""
    issues: list[str] = []
    limited = False
    if row.c_opt is None:
        limited = True
    elif not _close(row.c_opt, exp.c_opt, 1e-9):
        issues.append(f"c_opt: expected {exp.c_opt}, got {_fmt(row.c_opt)}")
    if not _close(row.big_m, exp.big_m, 1e-9):
        issues.append(f"big_m: expected {exp.big_m}, got {_fmt(row.big_m)}")
    if "flow" in config.methods:
        if row.flow.lpr is None:
            limited = True
        elif not _close(row.flow.lpr, exp.flow_lpr, FLOW_LPR_TOL):
            issues.append(
                f"flow_lpr: expected {_fmt(exp.flow_lpr)}, "
                f"got {_fmt(row.flow.lpr)}")
    if issues:
        return "MISMATCH(" + "; ".join(issues) + ")"
    if limited:
        return "SKIPPED(limit)"
    return "MATCH"


def run_benchmark(config: BenchConfig) -> tuple[list[BenchRow], str]:
    """Run the sweep; returns ordered rows and the overall verdict.

    The overall verdict is MISMATCH if any row mismatches, else SKIPPED
    if any checked row was budget-bound, else MATCH (or "" when no row
    had a reference to check against).
    """
    cells = [(m, p) for m in config.m_values for p in config.p_values]
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        rows = list(pool.map(lambda mp: _solve_cell(config, *mp), cells))
    rows.sort(key=lambda r: (r.m, float(r.p)))
    overall = ""
    verdicts = [r.verdict for r in rows if r.verdict]
    if any(v.startswith("MISMATCH") for v in verdicts):
        overall = "MISMATCH"
    elif any(v.startswith("SKIPPED") for v in verdicts):
        overall = "SKIPPED"
    elif verdicts:
        overall = "MATCH"
    return rows, overall


def _fmt(value) -> str:
    if value is None:
        return ""
    v = float(value)
    r = round(v)
    if abs(v - r) < 1e-6:
        return str(int(r))
    return f"{round(v, 6):g}"


def _fmt_seconds(value) -> str:
    return "" if value is None else f"{value:.3f}"


def _row_values(row: BenchRow) -> list[str]:
    return [
        str(row.m), _fmt(row.p), _fmt(row.c_opt), _fmt(row.big_m),
        _fmt(row.mtz.lpr), _fmt(row.mtz.objective), _fmt_seconds(row.mtz.seconds),
        _fmt(row.vajda.lpr), _fmt(row.vajda.objective), _fmt_seconds(row.vajda.seconds),
        _fmt(row.flow.lpr), _fmt(row.flow.objective), _fmt_seconds(row.flow.seconds),
        _fmt(row.enum.objective), _fmt_seconds(row.enum.seconds),
        row.verdict,
    ]


def render_csv(rows: Sequence[BenchRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(_row_values(row))
    return buf.getvalue()


def render_markdown(rows: Sequence[BenchRow]) -> str:
    lines = ["| " + " | ".join(CSV_COLUMNS) + " |",
             "|" + "---|" * len(CSV_COLUMNS)]
    for row in rows:
        lines.append("| " + " | ".join(_row_values(row)) + " |")
    return "\n".join(lines) + "\n"


def emit_plot_data(rows: Sequence[BenchRow],
                   methods: Sequence[str] = METHODS) -> dict:
    """Solve-seconds curves: one series per (m, method) with timed cells.

    Returns a schema-versioned dict; points are (p, seconds) pairs with
    strictly increasing p.
    """
    if not rows:
        raise ValueError("rows must be non-empty")
    if not methods:
        raise ValueError("empty method selection")
    bad = [x for x in methods if x not in METHODS]
    if bad:
        raise ValueError(f"unknown methods: {', '.join(bad)}")
    series = []
    for m in sorted({r.m for r in rows}):
        for method in methods:
            pts = [(float(r.p), r.cell(method).seconds)
                   for r in rows
                   if r.m == m and r.cell(method).seconds is not None]
            if not pts:
                continue
            pts.sort(key=lambda t: t[0])
            for (p1, _), (p2, _) in zip(pts, pts[1:]):
                if p2 <= p1:
                    raise ValueError(
                        f"duplicate p={p2:g} in series m={m} {method}")
            series.append({"m": m, "method": method,
                           "points": [[p, round(s, 6)] for p, s in pts]})
    if not series:
        raise ValueError("no timed cells for the selected methods")
    return {"v": 1, "series": series}
