"""Exact minimization of the cycle time over all cycle orders.

The search walks the (2m-1)! orders that start at the anchor load, cutting
subtrees with admissible lower bounds, so the returned optimum is proven.
Two interchangeable kernels do the heavy lifting: a compiled extension
(``robocell._speedups``) when the build produced one, and a pure-Python
twin (``robocell._pykernel``) otherwise.  ``KERNEL`` names the one in use.

All arithmetic is exact: instance durations are scaled to integers (the
cycle-time denominator divides lcm(1..m), so scaling by it makes every
optimal value integral) and unscaled on the way out.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import _pykernel
from .cell import Activity, CellInstance, activities, distance, min_separation
from .schedule import CycleOrder, Schedule, evaluate_cycle

try:  # compiled kernel is optional; the build may have skipped it
    from . import _speedups  # type: ignore[attr-defined]
except ImportError:  # pragma: no cover - depends on the build environment
    _speedups = None

KERNEL = "compiled" if _speedups is not None else "python"

# int64 headroom for the compiled kernel: sums of a few weights must not wrap
_I64_SAFE = 2**60


class SearchLimit(RuntimeError):
    """Raised when the node budget runs out before optimality is proven."""


@dataclass(frozen=True)
class SearchOptions:
    """Knobs for :func:`solve_exact`.

    prune=False degrades the scan to plain exhaustive enumeration (useful
    as an oracle).  deterministic=True keeps tied subtrees alive and
    returns the lexicographically least optimal order at the cost of a
    larger scan.  workers>1 shards the scan by first activity across
    processes.  node_limit bounds interior expansions (per shard);
    exceeding it raises :class:`SearchLimit` unless partial=True, in which
    case the best incumbent is returned with ``proven=False``.
    """

    prune: bool = True
    deterministic: bool = False
    kernel: str = "auto"  # "auto" | "compiled" | "python"
    node_limit: Optional[int] = None
    partial: bool = False
    workers: int = 1
    warm_start: bool = True

    def __post_init__(self) -> None:
        if self.kernel not in ("auto", "compiled", "python"):
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if self.kernel == "compiled" and _speedups is None:
            raise ValueError("compiled kernel requested but not built")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.node_limit is not None and self.node_limit < 1:
            raise ValueError("node_limit must be positive")


@dataclass(frozen=True)
class SolveResult:
    """Outcome of an exact search."""

    instance: CellInstance
    order: CycleOrder
    cycle_time: object
    schedule: Schedule
    nodes: int
    leaves: int
    proven: bool
    kernel: str
    elapsed: float

    def __str__(self) -> str:
        flag = "proven" if self.proven else "incumbent"
        return (
            f"C*={self.cycle_time} ({flag}) order={self.order.to_text()} "
            f"nodes={self.nodes} kernel={self.kernel}"
        )


def _scaled_data(inst: CellInstance) -> tuple[list[int], list[int], int]:
    """Integer distance matrix, separations, and the scale that was applied."""
    m = inst.m
    n = 2 * m
    if not inst.is_exact():  # floats are dyadic rationals; model them exactly
        inst = CellInstance(
            m, Fraction(inst.epsilon), Fraction(inst.delta),
            [Fraction(p) for p in inst.proc],
        )
    values = [inst.epsilon, inst.delta, *inst.proc]
    denom = math.lcm(*(Fraction(v).denominator for v in values))
    scale = denom * math.lcm(*range(1, m + 1))
    acts = activities(m)
    dist = [0] * (n * n)
    for a in acts:
        ia = a.index(m)
        for b in acts:
            if a == b:
                continue
            dist[ia * n + b.index(m)] = int(distance(inst, a, b) * scale)
    sep = [int(min_separation(inst, i) * scale) for i in range(1, m + 1)]
    return dist, sep, scale


def _unscale(value: int, scale: int, inst: CellInstance) -> object:
    out = Fraction(value, scale)
    if not inst.is_exact():
        return float(out)
    if out.denominator == 1:
        return int(out)
    return out


def _ids_to_order(ids: Sequence[int], m: int) -> CycleOrder:
    seq = []
    for a in ids[1:]:
        kind = "L" if a < m else "U"
        machine = a + 1 if a < m else a - m + 1
        seq.append(Activity(kind, machine))
    return CycleOrder(m, tuple(seq))


def _pick_kernel(opts: SearchOptions, dist: list[int], sep: list[int]):
    if opts.kernel == "python":
        return _pykernel, "python"
    if _speedups is None:
        return _pykernel, "python"
    weight = sum(dist) + sum(sep)
    if weight >= _I64_SAFE:  # huge scaled weights: stay in bignum land
        return _pykernel, "python"
    return _speedups, "compiled"


def _warm_orders(m: int) -> list[list[int]]:
    """Cheap starting incumbents: load-chain tour and all-adjacent tour."""
    loads = list(range(1, m))
    unloads = list(range(m, 2 * m))
    chain = [0] + loads + unloads
    adjacent = [0]
    for i in range(1, m):
        adjacent += [m + i, i]
    adjacent.append(m)
    return [chain, adjacent]


def _run_shard(args):
    (kernel_name, m, dist, sep, prune, strict, ub, ub_order, node_limit, first) = args
    mod = _speedups if kernel_name == "compiled" else _pykernel
    return mod.search(
        m, dist, sep, prune=prune, strict=strict, ub=ub, ub_order=ub_order,
        node_limit=node_limit, first=first,
    )


def solve_exact(
    inst: CellInstance, options: SearchOptions = SearchOptions()
) -> SolveResult:
    """Prove an optimal cycle order and its cycle time for ``inst``."""
    t0 = time.perf_counter()
    m = inst.m
    dist, sep, scale = _scaled_data(inst)
    mod, kernel_name = _pick_kernel(options, dist, sep)

    ub = ub_order = None
    if options.warm_start:
        cands = []
        for ids in _warm_orders(m):
            c = _pykernel.leaf_cycle_time(m, ids, dist, sep)
            cands.append((c, ids))
        c, ids = min(cands)
        ub = c
        ub_order = None if options.deterministic else ids

    strict = options.deterministic
    if options.workers > 1 and m >= 2:
        shards = [
            (kernel_name, m, dist, sep, options.prune, strict, ub, ub_order,
             options.node_limit, f)
            for f in range(1, 2 * m)
        ]
        results = []
        with ProcessPoolExecutor(max_workers=options.workers) as pool:
            for out in pool.map(_run_shard, shards):
                results.append(out)
        nodes = sum(r[2] for r in results)
        leaves = sum(r[3] for r in results)
        complete = all(r[4] for r in results)
        found = [(r[0], r[1]) for r in results if r[0] is not None and r[1] is not None]
        if ub is not None and ub_order is not None:
            found.append((ub, ub_order))
        best, best_ids = min(found)
    else:
        best, best_ids, nodes, leaves, complete = mod.search(
            m, dist, sep, prune=options.prune, strict=strict, ub=ub,
            ub_order=ub_order, node_limit=options.node_limit, first=None,
        )
    if best is None or best_ids is None:
        raise SearchLimit(f"node limit {options.node_limit} hit before any leaf")
    if not complete and not options.partial:
        raise SearchLimit(
            f"node limit {options.node_limit} hit after {nodes} nodes "
            f"(incumbent {_unscale(best, scale, inst)})"
        )

    order = _ids_to_order(best_ids, m)
    sched = evaluate_cycle(inst, order)
    cycle_time = _unscale(best, scale, inst)
    if inst.is_exact():
        agree = sched.cycle_time == cycle_time
    else:  # float evaluation bisects; allow it the last few ulps
        agree = math.isclose(sched.cycle_time, cycle_time, rel_tol=1e-9, abs_tol=1e-9)
    if not agree:  # cross-check kernel against the standalone evaluator
        raise AssertionError(
            f"kernel/evaluator disagree: {cycle_time} vs {sched.cycle_time}"
        )
    return SolveResult(
        instance=inst,
        order=order,
        cycle_time=cycle_time,
        schedule=sched,
        nodes=nodes,
        leaves=leaves,
        proven=complete,
        kernel=kernel_name,
        elapsed=time.perf_counter() - t0,
    )


def enumerate_exact(inst: CellInstance) -> SolveResult:
    """Plain exhaustive enumeration (oracle mode, deterministic order)."""
    return solve_exact(
        inst,
        SearchOptions(prune=False, deterministic=True, warm_start=False),
    )


def prefix_bound(inst: CellInstance, prefix: Sequence[Activity]) -> object:
    """Admissible lower bound on the best completion of a partial order.

    ``prefix`` lists activities after the anchor load (which is implicit).
    The bound is the one the search kernels cut with; any complete order
    extending the prefix has a cycle time at least this large.
    """
    m = inst.m
    n = 2 * m
    dist, sep, scale = _scaled_data(inst)
    for a in prefix:
        if a.machine > m:
            raise ValueError(f"{a} does not belong to a cell with {m} machines")
    ids = [0] + [a.index(m) for a in prefix]
    if len(set(ids)) != len(ids):
        raise ValueError("prefix repeats an activity")
    if 0 in ids[1:]:
        raise ValueError("the anchor load is implicit and cannot reappear")
    if len(ids) == n:
        # complete order: the tightest admissible bound is the leaf value
        return evaluate_cycle(inst, CycleOrder(m, tuple(prefix))).cycle_time

    min_in = [min(dist[v * n + u] for v in range(n) if v != u) for u in range(n)]
    used = [False] * n
    te = pd = 0
    tpos = {0: 0}
    dsum = {0: 0}
    lpos: dict[int, int] = {0: 0}
    upos: dict[int, int] = {}
    used[0] = True
    loop_lb = 0
    for q, a in enumerate(ids[1:], start=1):
        prev = ids[q - 1]
        d = dist[prev * n + a]
        t = te + d
        i = a if a < m else a - m
        if a < m:
            if i in upos:
                loop_lb = max(loop_lb, sep[i] + (pd + d - dsum[upos[i]]))
            lpos[i] = q
        else:
            if i in lpos:
                t = max(t, tpos[lpos[i]] + sep[i])
            upos[i] = q
        te, pd = t, pd + d
        tpos[q], dsum[q] = te, pd
        used[a] = True

    last = ids[-1]
    rem = [u for u in range(1, n) if not used[u]]
    if rem:
        chain = te + sum(min_in[u] for u in rem) + min(dist[u * n] for u in rem)
    else:
        chain = te + dist[last * n]
    lb = max(loop_lb, chain)
    for i in range(m):
        if i in upos and i not in lpos:
            lb = max(lb, sep[i] + (pd - dsum[upos[i]]) + dist[last * n + i])
        elif i in lpos and i not in upos:
            lb = max(lb, tpos[lpos[i]] + sep[i] + dist[(m + i) * n])
    return _unscale(lb, scale, inst)
