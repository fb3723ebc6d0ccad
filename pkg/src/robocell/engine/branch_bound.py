"""Branch and bound over the bounded-variable simplex.

Consumes a :class:`robocell.milp.model.MilpModel` directly: the model is
relaxed to equality-form arrays once, and every node only changes
variable bounds, so child LPs restart dual-feasibly from the parent
basis.  Node selection is best-bound (ties by insertion order), the
branching variable is the most fractional integer column (ties by lowest
column index), which keeps runs deterministic for a given model.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .simplex import LpResult, solve_bounded

INT_TOL = 1e-6


@dataclass
class BnbOptions:
    int_tol: float = INT_TOL
    gap: float = 0.0  # absolute: stop when no node can improve by more
    node_limit: Optional[int] = None
    time_limit: Optional[float] = None  # seconds
    log: Optional[Callable[[str], None]] = None


@dataclass
class MilpSolution:
    status: str  # "optimal" | "infeasible" | "limit"
    objective: Optional[float]
    x: dict[str, float]
    bound: float
    nodes: int
    iterations: int = 0

    def __str__(self) -> str:
        obj = "-" if self.objective is None else f"{self.objective:.6g}"
        return (f"{self.status}: objective {obj}, bound {self.bound:.6g}, "
                f"{self.nodes} nodes")


@dataclass(order=True)
class _Node:
    bound: float
    seq: int
    depth: int = field(compare=False)
    fixes: dict = field(compare=False)  # col -> (lo, hi)
    start: Optional[tuple] = field(compare=False, default=None)


def solve_lp_relaxation(model) -> LpResult:
    """Solve the LP relaxation of ``model`` (integrality dropped)."""
    c, A, b, lo, hi, _ints, _names = model.relaxation_arrays()
    return solve_bounded(c, A, b, lo, hi)


def relaxation_value(model) -> float:
    """Objective of the LP relaxation; NaN when infeasible."""
    res = solve_lp_relaxation(model)
    return res.objective if res.status == "optimal" else float("nan")


def warm_start(model, order) -> dict[str, float]:
    """Feasible assignment for ``model`` scoring ``order``'s cycle time.

    The encoding is formulation-specific and lives with the builders;
    this wrapper is the engine-facing entry point.  Raises when the
    model metadata does not match the instance or when the order is too
    slow to fit under the model's big-M.
    """
    from ..milp.formulations import encode_order

    return encode_order(model, order)


def solve_milp(model, options: Optional[BnbOptions] = None,
               incumbent: Optional[dict[str, float]] = None) -> MilpSolution:
    """Branch and bound to an exact mixed-binary optimum of ``model``.

    ``incumbent`` primes the search with a known feasible assignment
    (see :func:`warm_start`); only its objective participates in
    pruning, the assignment itself is returned if nothing beats it.
    """
    opts = options or BnbOptions()
    c, A, b, lo0, hi0, int_cols, names = model.relaxation_arrays()
    n_struct = len(model.variables)
    int_cols = sorted(int_cols)
    started = time.monotonic()

    best_obj = math.inf
    best_x: Optional[np.ndarray] = None
    best_assign: Optional[dict[str, float]] = None
    if incumbent is not None:
        gap_chk = model.constraint_violation(incumbent)
        if gap_chk > 1e-6:
            raise ValueError(
                f"incumbent assignment violates the model by {gap_chk:.3g}")
        best_obj = float(sum(float(v) * incumbent.get(k, 0.0)
                             for k, v in model.objective.items()))
        best_assign = {v.name: float(incumbent.get(v.name, 0.0))
                       for v in model.variables}

    total_iters = 0
    nodes_solved = 0
    heap: list[_Node] = []
    seq = 0
    heapq.heappush(heap, _Node(-math.inf, seq, 0, {}))

    def emit(nid: int, depth: int, bound: float, branch: str) -> None:
        if opts.log is not None:
            inc = "-" if best_obj == math.inf else f"{best_obj:.6g}"
            opts.log(f"node {nid} depth {depth} bound {bound:.6g} "
                     f"incumbent {inc} branch {branch}")

    status = "optimal"
    while heap:
        if opts.node_limit is not None and nodes_solved >= opts.node_limit:
            status = "limit"
            break
        if (opts.time_limit is not None
                and time.monotonic() - started > opts.time_limit):
            status = "limit"
            break
        node = heapq.heappop(heap)
        # parent bound may already be beaten by the incumbent
        if node.bound >= best_obj - opts.gap - 1e-7:
            continue
        lo = lo0.copy()
        hi = hi0.copy()
        for col, (cl, ch) in node.fixes.items():
            lo[col], hi[col] = cl, ch
        res = solve_bounded(c, A, b, lo, hi, start=node.start)
        nodes_solved += 1
        total_iters += res.iterations
        nid = nodes_solved
        if res.status == "unbounded":
            raise RuntimeError("model relaxation is unbounded")
        if res.status != "optimal":
            emit(nid, node.depth, math.inf, "-")
            continue
        bound = res.objective
        if bound >= best_obj - opts.gap - 1e-7:
            emit(nid, node.depth, bound, "-")
            continue
        # pick the most fractional integer column, lowest index on ties
        frac_col = -1
        frac_best = opts.int_tol
        for j in int_cols:
            f = abs(res.x[j] - round(res.x[j]))  # in [0, 0.5]
            if f > frac_best + 1e-12:
                frac_best = f
                frac_col = j
        if frac_col < 0:
            # integral: new incumbent
            best_obj = bound
            best_x = res.x.copy()
            best_assign = None
            emit(nid, node.depth, bound, "integral")
            continue
        emit(nid, node.depth, bound, names[frac_col])
        val = res.x[frac_col]
        down = dict(node.fixes)
        down[frac_col] = (lo[frac_col], math.floor(val))
        up = dict(node.fixes)
        up[frac_col] = (math.ceil(val), hi[frac_col])
        start = (res.basis, res.vstat)
        for fixes in (down, up):
            seq += 1
            heapq.heappush(heap, _Node(bound, seq, node.depth + 1, fixes, start))

    open_bound = min((nd.bound for nd in heap), default=math.inf)
    if status == "optimal" and best_obj == math.inf:
        return MilpSolution("infeasible", None, {}, math.inf, nodes_solved,
                            total_iters)
    bound = best_obj if status == "optimal" else min(open_bound, best_obj)
    if best_x is not None:
        assign = {names[j]: _snap(float(best_x[j]), opts.int_tol)
                  for j in range(n_struct)}
    elif best_assign is not None:
        assign = best_assign
    else:
        return MilpSolution("limit", None, {}, bound, nodes_solved, total_iters)
    obj = None if best_obj == math.inf else best_obj
    return MilpSolution(status, obj, assign, bound, nodes_solved, total_iters)


def _snap(v: float, tol: float) -> float:
    r = round(v)
    return float(r) if abs(v - r) <= tol else v
