"""Cycle orders and exact evaluation of their steady-state cycle time.

A cycle is anchored at the completion of L_1 (time 0) and lists the
remaining 2m-1 activities in execution order.  Machine pairing is
implied by the order: z_i = 1 when L_i completes before U_i within the
cycle (the unload serves the part loaded in the same cycle), z_i = 0
when U_i comes first (it serves the previous cycle's part, which turns
the separation constraint into a cross-cycle one involving C).

Minimizing C is a small linear program, not a greedy chain: delaying an
early unload can shrink a cross-cycle requirement, so earliest-start
chaining alone is wrong.  The default evaluator solves the equivalent
maximum cost-to-period ratio problem on the constraint graph with a
feasibility check per candidate C (longest path / positive cycle
detection), which is exact for integer and rational inputs.  A direct
LP solve over the same constraints is available as a second,
independently implemented method.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

from .cell import Activity, CellInstance, L, activities, canonical_order, distance, min_separation

__all__ = [
    "CycleOrder",
    "InvalidOrderError",
    "Schedule",
    "evaluate_cycle",
    "schedule_to_json",
    "timeline",
    "waits",
]


class InvalidOrderError(ValueError):
    """Raised when an activity order is not a valid cycle body."""


@dataclass(frozen=True)
class CycleOrder:
    """The 2m-1 activities of one cycle, in order, after the anchor L_1."""

    m: int
    sequence: tuple

    def __init__(self, m: int, sequence) -> None:
        seq = tuple(sequence)
        expected = set(activities(m)) - {L(1)}
        if set(seq) != expected or len(seq) != len(expected):
            raise InvalidOrderError(
                f"order must list every activity except L1 exactly once for m={m}; got "
                + (" ".join(str(a) for a in seq) or "<empty>")
            )
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "sequence", seq)

    @classmethod
    def parse(cls, text: str, m: int | None = None) -> "CycleOrder":
        """Parse "L2 L3 U1 ..." (a trailing L1 closing token is ignored)."""
        tokens = text.replace(",", " ").split()
        if not tokens:
            raise InvalidOrderError("empty order text")
        acts = [Activity.parse(t) for t in tokens]
        if len(acts) > 1 and acts[-1] == L(1):
            acts = acts[:-1]
        if m is None:
            m = (len(acts) + 1) // 2
        return cls(m, acts)

    @classmethod
    def canonical(cls, m: int) -> "CycleOrder":
        return cls(m, canonical_order(m))

    def to_text(self) -> str:
        return " ".join(str(a) for a in self.sequence)

    def __str__(self) -> str:
        return self.to_text()

    def positions(self) -> dict:
        """Activity -> position, with the anchor L_1 at position 0."""
        pos = {L(1): 0}
        for k, a in enumerate(self.sequence, start=1):
            pos[a] = k
        return pos

    def pairing(self) -> dict:
        """z_i per machine: 1 if L_i precedes U_i in the cycle, else 0."""
        pos = self.positions()
        return {i: 1 if pos[Activity("L", i)] < pos[Activity("U", i)] else 0 for i in range(1, self.m + 1)}


@dataclass(frozen=True)
class Schedule:
    """Earliest-completion schedule of a cycle order at its optimal C."""

    order: CycleOrder
    cycle_time: object
    completion: dict
    pairing: dict = field(repr=False)

    def waits(self) -> list:
        """(a, b, wait) for each consecutive pair, including the closing one."""
        inst = self._inst
        out = []
        prev = L(1)
        for b in self.order.sequence:
            w = self.completion[b] - self.completion[prev] - distance(inst, prev, b)
            out.append((prev, b, w))
            prev = b
        w = self.cycle_time - self.completion[prev] - distance(inst, prev, L(1))
        out.append((prev, L(1), w))
        return out

    @property
    def total_wait(self):
        return sum(w for _, _, w in self.waits())

    @property
    def travel_time(self):
        inst = self._inst
        chain = [L(1), *self.order.sequence, L(1)]
        return sum(distance(inst, a, b) for a, b in zip(chain, chain[1:]))

    @property
    def _inst(self) -> CellInstance:
        return self.__dict__["instance"]


def _attach_instance(sched: Schedule, inst: CellInstance) -> Schedule:
    sched.__dict__["instance"] = inst
    return sched


# ---------------------------------------------------------------------------
# Constraint graph construction
# ---------------------------------------------------------------------------

def _constraint_arcs(inst: CellInstance, order: CycleOrder) -> list:
    """Arcs (u, v, w, k) meaning t_v + k*C >= t_u + w, над position nodes.

    Node 0 is the anchor L_1 (t = 0); nodes 1..2m-1 follow the order.
    k = 1 marks constraints that wrap into the next cycle: the closing
    move back to L_1 and the separation of machines with z_i = 0.
    """
    m = inst.m
    seq = list(order.sequence)
    n = 2 * m
    arcs = []
    chain = [L(1), *seq]
    for k in range(n - 1):
        arcs.append((k, k + 1, distance(inst, chain[k], chain[k + 1]), 0))
    arcs.append((n - 1, 0, distance(inst, chain[-1], L(1)), 1))
    pos = order.positions()
    for i in range(1, m + 1):
        pl, pu = pos[Activity("L", i)], pos[Activity("U", i)]
        sep = min_separation(inst, i)
        arcs.append((pl, pu, sep, 1 if pl > pu else 0))
    return arcs


def _exact_scale(inst: CellInstance) -> int | None:
    """Multiplier turning all durations into ints, or None for float data."""
    values = (inst.epsilon, inst.delta, *inst.proc)
    scale = 1
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, Rational)):
            return None
        if not isinstance(v, int):
            scale = scale * Fraction(v).denominator // math.gcd(scale, Fraction(v).denominator)
    return scale


# ---------------------------------------------------------------------------
# Parametric longest-path evaluation (exact)
# ---------------------------------------------------------------------------

def _forward_longest(n: int, arcs, source: int):
    """Longest path over k=0 arcs (a DAG in position order) from source."""
    dist = [None] * n
    dist[source] = 0
    for u, v, w, k in sorted(a for a in arcs if a[3] == 0):
        if dist[u] is not None:
            cand = dist[u] + w
            if dist[v] is None or cand > dist[v]:
                dist[v] = cand
    return dist


def _feasible(n: int, arcs, c):
    """Longest-path feasibility of period c; returns times or None.

    Runs Bellman-Ford relaxation with the anchor pinned at 0.  Any
    positive cycle, or any wrap arc demanding t_0 > 0, rules c out.
    """
    neg = None
    dist = [neg] * n
    dist[0] = 0
    for round_no in range(n + 1):
        changed = False
        for u, v, w, k in arcs:
            du = dist[u]
            if du is None:
                continue
            cand = du + w - k * c
            if v == 0:
                if cand > 0:
                    return None
            elif dist[v] is None or cand > dist[v]:
                dist[v] = cand
                changed = True
        if not changed:
            return dist
    return None


def _solve_parametric_int(n: int, arcs):
    """Minimal integer-feasible period for integer arc weights.

    Caller pre-scales weights so the optimum is integral (weights are
    multiplied by lcm(1..m), the largest possible number of wrap arcs on
    a simple cycle).
    """
    lo = 0
    for u, v, w, k in arcs:
        if k == 1:
            back = _forward_longest(n, arcs, v)
            cand = w + (back[u] if back[u] is not None else 0)
            if cand > lo:
                lo = cand
    if _feasible(n, arcs, lo) is not None:
        return lo
    hi = sum(w for _, _, w, _ in arcs)
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if _feasible(n, arcs, mid) is not None:
            hi = mid
        else:
            lo = mid
    return hi


def _solve_parametric_float(n: int, arcs):
    lo = 0.0
    for u, v, w, k in arcs:
        if k == 1:
            back = _forward_longest(n, arcs, v)
            cand = w + (back[u] if back[u] is not None else 0.0)
            lo = max(lo, cand)
    if _feasible(n, arcs, lo) is not None:
        return lo
    hi = float(sum(w for _, _, w, _ in arcs))
    for _ in range(128):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if _feasible(n, arcs, mid) is not None:
            hi = mid
        else:
            lo = mid
    return hi


def _evaluate_graph(inst: CellInstance, order: CycleOrder):
    n = 2 * inst.m
    arcs = _constraint_arcs(inst, order)
    scale = _exact_scale(inst)
    if scale is None:
        c = _solve_parametric_float(n, [(u, v, float(w), k) for u, v, w, k in arcs])
        times = _feasible(n, [(u, v, float(w), k) for u, v, w, k in arcs], c)
        if times is None:  # guard against the last bisection step
            c = math.nextafter(c, math.inf)
            times = _feasible(n, [(u, v, float(w), k) for u, v, w, k in arcs], c)
        return c, times
    full = scale * math.lcm(*range(1, inst.m + 1))
    scaled = [(u, v, int(w * full), k) for u, v, w, k in arcs]
    c_scaled = _solve_parametric_int(n, scaled)
    times_scaled = _feasible(n, scaled, c_scaled)
    def unscale(x):
        q = Fraction(x, full)
        return int(q) if q.denominator == 1 else q
    return unscale(c_scaled), [unscale(t) for t in times_scaled]


# ---------------------------------------------------------------------------
# LP evaluation (independent second method)
# ---------------------------------------------------------------------------

def _evaluate_lp(inst: CellInstance, order: CycleOrder):
    """Solve the min-C LP over the same constraints with the simplex core.

    Variables are t_1..t_{2m-1} (completion times along the order; the
    anchor is pinned at 0) plus C; every arc (u, v, w, k) becomes
    t_v - t_u + k*C >= w.  Exact rational pivoting keeps the result
    directly comparable with the graph method.
    """
    from .engine.simplex import solve_dense_exact

    n = 2 * inst.m
    arcs = _constraint_arcs(inst, order)
    exact = _exact_scale(inst) is not None
    conv = (lambda x: Fraction(x)) if exact else float
    nvars = n  # t_1..t_{n-1} are columns 0..n-2, C is column n-1
    rows = []
    rhs = []
    for u, v, w, k in arcs:
        coeff = [0] * nvars
        if v != 0:
            coeff[v - 1] += 1
        if u != 0:
            coeff[u - 1] -= 1
        if k:
            coeff[nvars - 1] += 1
        rows.append([conv(c) for c in coeff])
        rhs.append(conv(w))
    objective = [conv(0)] * (nvars - 1) + [conv(1)]
    value, solution = solve_dense_exact(objective, rows, rhs, exact=exact)
    times = [conv(0)] + solution[: n - 1]
    c = value
    if exact:
        c = int(c) if c.denominator == 1 else c
        times = [int(t) if t.denominator == 1 else t for t in times]
    return c, times


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------

def evaluate_cycle(inst: CellInstance, order, method: str = "graph") -> Schedule:
    """Exact minimal cycle time and earliest schedule of an activity order.

    method "graph" (default) runs the parametric longest-path solve;
    method "lp" solves the same system as a linear program.  Both agree
    exactly on rational data.
    """
    if isinstance(order, str):
        order = CycleOrder.parse(order, m=inst.m)
    elif not isinstance(order, CycleOrder):
        order = CycleOrder(inst.m, order)
    if order.m != inst.m:
        raise InvalidOrderError(f"order is for m={order.m}, instance has m={inst.m}")
    if method == "graph":
        c, times = _evaluate_graph(inst, order)
    elif method == "lp":
        c, times = _evaluate_lp(inst, order)
    else:
        raise ValueError(f"unknown evaluation method {method!r}")
    if method == "lp":
        # report the canonical earliest schedule regardless of LP degeneracy
        g_times = _feasible(2 * inst.m, _constraint_arcs(inst, order), c)
        if g_times is not None:
            times = g_times
    completion = {L(1): times[0]}
    for k, a in enumerate(order.sequence, start=1):
        completion[a] = times[k]
    sched = Schedule(order=order, cycle_time=c, completion=completion, pairing=order.pairing())
    return _attach_instance(sched, inst)


def waits(inst: CellInstance, order) -> list:
    """Waiting time on every consecutive arc of the order's earliest schedule."""
    sched = order if isinstance(order, Schedule) else evaluate_cycle(inst, order)
    return sched.waits()


def _end_station(inst: CellInstance, a: Activity) -> int:
    return a.machine if a.kind == "L" else inst.m + 1


def _pick_station(inst: CellInstance, a: Activity) -> int:
    return 0 if a.kind == "L" else a.machine


def _drop_station(inst: CellInstance, a: Activity) -> int:
    return a.machine if a.kind == "L" else inst.m + 1


def timeline(inst: CellInstance, sched: Schedule) -> list:
    """Contiguous robot segments covering [0, C), as JSON-ready dicts.

    Hops last delta per station, pick/place last epsilon, and waiting
    shows up as an idle segment at the pickup station of the next
    activity.  Zero-length hops are omitted.
    """
    segments = []
    prev = L(1)
    chain = [*sched.order.sequence, L(1)]
    t = sched.completion[L(1)]
    for b in chain:
        t_b = sched.cycle_time if b == L(1) else sched.completion[b]
        wait = t_b - t - distance(inst, prev, b)
        cur = _end_station(inst, prev)
        pick = _pick_station(inst, b)
        drop = _drop_station(inst, b)

        def add(action, frm, to, dur):
            nonlocal t
            if dur == 0 and action == "move":
                return
            segments.append({"action": action, "from": frm, "to": to, "start": t, "end": t + dur})
            t = t + dur

        add("move", cur, pick, abs(cur - pick) * inst.delta)
        if wait > 0:
            add("wait", pick, pick, wait)
        add("pick", pick, pick, inst.epsilon)
        add("move", pick, drop, abs(pick - drop) * inst.delta)
        add("place", drop, drop, inst.epsilon)
        if t != t_b:
            raise AssertionError(f"timeline drift at {b}: {t} != {t_b}")
        prev = b
    return segments


def _json_number(x):
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else float(x)
    return x


def schedule_to_json(inst: CellInstance, sched: Schedule, include_timeline: bool = False) -> dict:
    data = {
        "v": 1,
        "m": inst.m,
        "order": sched.order.to_text(),
        "cycle_time": _json_number(sched.cycle_time),
        "completion": {str(a): _json_number(t) for a, t in sched.completion.items()},
        "pairing": {str(i): z for i, z in sched.pairing.items()},
        "waits": [
            {"from": str(a), "to": str(b), "wait": _json_number(w)} for a, b, w in sched.waits()
        ],
        "total_wait": _json_number(sched.total_wait),
        "travel": _json_number(sched.travel_time),
    }
    if include_timeline:
        data["timeline"] = [
            {k: (_json_number(v) if k in ("start", "end") else v) for k, v in seg.items()}
            for seg in timeline(inst, sched)
        ]
    return data
