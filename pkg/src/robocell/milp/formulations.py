"""MILP formulations of the cyclic robot-scheduling problem.

Three families share the assignment core (every activity has exactly one
predecessor and one successor):

* :func:`build_mtz` — completion-time variables per activity with big-M
  sequencing rows, in the style of the MTZ tour formulation.
* :func:`build_vajda` — step-indexed move binaries (activity a to b at
  step s) chained by flow-continuity rows.
* :func:`build_flow` — a single-commodity flow where the flow value on
  the used arc into an activity equals that activity's completion time;
  waits ride along as separate arc flows.

MTZ and Vajda come in two variants: ``base`` states only the lower
sequencing inequalities, ``waits`` adds explicit per-arc waiting
variables with matching upper rows so the timing is pinned exactly.
Both default to minimizing the cycle length variable C; the waits
variant can instead minimize travel plus waiting (``objective="travel"``),
which has the same integer optimum.

Every model anchors the cycle at the completion of the first loading
activity: its completion variable is fixed to zero and the first
machine's same-cycle indicator is fixed to one (the flow model needs
neither, its balance rows start the clock).  Big-M coefficients use the
closed-form bound of :func:`robocell.cell.big_m` on uniform instances
and a canonical-order fallback otherwise.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence, Union

from ..cell import (
    Activity,
    CellInstance,
    L,
    activities,
    big_m,
    canonical_order,
    distance,
    instance_hash,
    load_instance,
    min_separation,
)
from ..schedule import CycleOrder, evaluate_cycle
from .model import BINARY, CONTINUOUS, MilpModel, ModelError

Number = Union[int, float]


def _num(value) -> Number:
    """Coerce exact or float durations to int when integral, else float."""
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return int(value) if value.denominator == 1 else float(value)
    f = float(value)
    return int(f) if f.is_integer() else f


def _lab(a: Activity) -> str:
    return f"{a.kind}{a.machine}"


def _U(j: int) -> Activity:
    return Activity("U", j)


def _arc(prefix: str, a: Activity, b: Activity) -> str:
    return f"{prefix}_{_lab(a)}_{_lab(b)}"


def _arcs(m: int) -> list[tuple[Activity, Activity]]:
    acts = activities(m)
    return [(a, b) for a in acts for b in acts if a != b]


def _metadata(inst: CellInstance, formulation: str, variant: str,
              objective: str) -> dict:
    return {
        "v": 1,
        "formulation": formulation,
        "variant": variant,
        "objective": objective,
        "instance": inst.to_json(),
        "instance_hash": instance_hash(inst),
        "big_m": _big_m_value(inst),
    }


def _big_m_value(inst: CellInstance) -> Number:
    """Big-M for the sequencing rows.

    Uniform instances use the closed-form constant tied to the reference
    benchmarks.  Per-machine instances fall back to the canonical
    order's cycle time plus the largest single move and the largest
    machine separation, which covers every difference a relaxed row has
    to absorb.
    """
    if inst.uniform_p is not None:
        return _num(big_m(inst))
    c_can = evaluate_cycle(inst, canonical_order(inst.m)).cycle_time
    dmax = max(distance(inst, a, b) for a, b in _arcs(inst.m))
    smax = max(min_separation(inst, i) for i in range(1, inst.m + 1))
    return _num(c_can + dmax + smax)


def _return_bounds(inst: CellInstance) -> dict[Activity, Number]:
    """Shortest d-path from each activity to L1 over the complete digraph."""
    acts = activities(inst.m)
    h: dict[Activity, Number] = {a: _num(distance(inst, a, L(1)))
                                 for a in acts if a != L(1)}
    h[L(1)] = 0
    for _ in range(len(acts)):
        changed = False
        for a in acts:
            if a == L(1):
                continue
            best = min(_num(distance(inst, a, b)) + h[b]
                       for b in acts if b != a)
            if best < h[a]:
                h[a] = best
                changed = True
        if not changed:
            break
    return h


def _check_variant(variant: str, objective: str) -> None:
    if variant not in ("base", "waits"):
        raise ModelError(f"unknown variant {variant!r}")
    if objective not in ("cycle", "travel"):
        raise ModelError(f"unknown objective {objective!r}")
    if objective == "travel" and variant != "waits":
        raise ModelError("the travel objective needs the waits variant")


def build_mtz(inst: CellInstance, variant: str = "base",
              objective: str = "cycle", anchor: bool = True,
              cuts: bool = False) -> MilpModel:
    """Completion-time formulation with big-M sequencing rows.

    ``anchor=False`` drops the two reference fixes (t_L1 = 0, z_1 = 1);
    the integer optimum is unchanged but the LP relaxation weakens.
    ``cuts=True`` adds the travel lower bound C >= sum of d(a,b) x_ab,
    valid for every tour (timing telescopes around the cycle), which
    tightens the relaxation a branch and bound works from without
    touching the model's own bound.
    """
    _check_variant(variant, objective)
    m = inst.m
    acts = activities(m)
    arcs = _arcs(m)
    M = _big_m_value(inst)
    model = MilpModel(name=f"mtz_{variant}_m{m}",
                      metadata=_metadata(inst, "mtz", variant, objective))
    model.metadata["anchor"] = anchor

    for a, b in arcs:
        model.add_var(_arc("x", a, b), kind=BINARY)
    for a in acts:
        model.add_var(f"t_{_lab(a)}")
    model.add_var("C")
    for i in range(1, m + 1):
        model.add_var(f"z_{i}", kind=BINARY)
    if variant == "waits":
        for a, b in arcs:
            model.add_var(_arc("w", a, b))

    # anchor: the cycle is measured from the completion of L1, and the
    # first machine is loaded and unloaded within the same cycle
    if anchor:
        model.variables[model.var_index("t_L1")].hi = 0
        model.variables[model.var_index("z_1")].lo = 1

    for b in acts:
        model.add_constr(f"in_{_lab(b)}",
                         {_arc("x", a, b): 1 for a in acts if a != b}, "=", 1)
    for a in acts:
        model.add_constr(f"out_{_lab(a)}",
                         {_arc("x", a, b): 1 for b in acts if b != a}, "=", 1)

    for a, b in arcs:
        if b == L(1):
            continue
        d = _num(distance(inst, a, b))
        if variant == "base":
            model.add_constr(
                _arc("seq", a, b),
                {f"t_{_lab(b)}": 1, f"t_{_lab(a)}": -1, _arc("x", a, b): -M},
                ">=", d - M)
        else:
            model.add_constr(
                _arc("seq_lo", a, b),
                {f"t_{_lab(b)}": 1, f"t_{_lab(a)}": -1,
                 _arc("w", a, b): -1, _arc("x", a, b): -M},
                ">=", d - M)
            model.add_constr(
                _arc("seq_hi", a, b),
                {f"t_{_lab(b)}": 1, f"t_{_lab(a)}": -1,
                 _arc("w", a, b): -1, _arc("x", a, b): M},
                "<=", d + M)

    for i in range(1, m + 1):
        s = _num(min_separation(inst, i))
        tL, tU, z = f"t_L{i}", f"t_U{i}", f"z_{i}"
        model.add_constr(f"zlink_{i}", {tU: 1, tL: -1, z: -M}, "<=", 0)
        model.add_constr(f"sep_same_{i}", {tU: 1, tL: -1, z: -M}, ">=", s - M)
        model.add_constr(f"sep_cross_{i}",
                         {tL: 1, tU: -1, "C": -1, z: -s}, "<=", -s)

    for a in acts:
        if a == L(1):
            continue
        d = _num(distance(inst, a, L(1)))
        if variant == "base":
            model.add_constr(f"close_{_lab(a)}",
                             {"C": 1, f"t_{_lab(a)}": -1,
                              _arc("x", a, L(1)): -d}, ">=", 0)
        else:
            model.add_constr(
                f"close_lo_{_lab(a)}",
                {"C": 1, f"t_{_lab(a)}": -1,
                 _arc("w", a, L(1)): -1, _arc("x", a, L(1)): -M},
                ">=", d - M)
            model.add_constr(
                f"close_hi_{_lab(a)}",
                {"C": 1, f"t_{_lab(a)}": -1,
                 _arc("w", a, L(1)): -1, _arc("x", a, L(1)): M},
                "<=", d + M)

    if variant == "waits":
        for a, b in arcs:
            model.add_constr(_arc("wcap", a, b),
                             {_arc("w", a, b): 1, _arc("x", a, b): -M},
                             "<=", 0)

    if cuts:
        model.add_constr(
            "travel_lb",
            {"C": 1, **{_arc("x", a, b): -_num(distance(inst, a, b))
                        for a, b in arcs}},
            ">=", 0)
        ret = _return_bounds(inst)
        for a in acts:
            if a == L(1):
                continue
            model.add_constr(
                f"return_{_lab(a)}",
                {"C": 1, f"t_{_lab(a)}": -1,
                 **{_arc("x", a, b): -(_num(distance(inst, a, b)) + ret[b])
                    for b in acts if b != a}},
                ">=", 0)
        model.metadata["cuts"] = True

    if objective == "cycle":
        model.set_objective({"C": 1})
    else:
        obj = {_arc("x", a, b): _num(distance(inst, a, b)) for a, b in arcs}
        for a, b in arcs:
            obj[_arc("w", a, b)] = 1
        model.set_objective(obj)
    return model


def build_vajda(inst: CellInstance, variant: str = "base",
                objective: str = "cycle", anchor: bool = True,
                cuts: bool = False) -> MilpModel:
    """Step-indexed formulation: binary v moves activity a to b at step s.

    ``anchor`` and ``cuts`` act as in :func:`build_mtz`; the travel cut
    here sums d(a,b) over every step copy of the move binary.
    """
    _check_variant(variant, objective)
    m = inst.m
    n = 2 * m
    acts = activities(m)
    arcs = _arcs(m)
    M = _big_m_value(inst)
    model = MilpModel(name=f"vajda_{variant}_m{m}",
                      metadata=_metadata(inst, "vajda", variant, objective))
    model.metadata["anchor"] = anchor

    def v(a: Activity, b: Activity, s: int) -> str:
        return f"v_{_lab(a)}_{_lab(b)}_{s}"

    for a, b in arcs:
        for s in range(1, n + 1):
            model.add_var(v(a, b, s), kind=BINARY)
    for a in acts:
        model.add_var(f"t_{_lab(a)}")
    model.add_var("C")
    for i in range(1, m + 1):
        model.add_var(f"z_{i}", kind=BINARY)
    if variant == "waits":
        for a, b in arcs:
            model.add_var(_arc("w", a, b))

    if anchor:
        model.variables[model.var_index("t_L1")].hi = 0
        model.variables[model.var_index("z_1")].lo = 1

    for a in acts:
        model.add_constr(
            f"leave_{_lab(a)}",
            {v(a, b, s): 1 for b in acts if b != a for s in range(1, n + 1)},
            "=", 1)
    for b in acts:
        if b == L(1):
            continue
        for s in range(1, n):
            # arriving at b in step s forces leaving b in step s+1
            coeffs = {v(a, b, s): 1 for a in acts if a != b}
            for k in acts:
                if k != b:
                    coeffs[v(b, k, s + 1)] = coeffs.get(v(b, k, s + 1), 0) - 1
            model.add_constr(f"chain_{_lab(b)}_{s}", coeffs, "=", 0)
    for b in acts:
        model.add_constr(
            f"enter_{_lab(b)}",
            {v(a, b, s): 1 for a in acts if a != b for s in range(1, n + 1)},
            "=", 1)
    for s in range(1, n + 1):
        model.add_constr(f"step_{s}",
                         {v(a, b, s): 1 for a, b in arcs}, "=", 1)
    model.add_constr("last_step",
                     {v(a, L(1), n): 1 for a in acts if a != L(1)}, "=", 1)

    for a, b in arcs:
        if b == L(1):
            continue
        d = _num(distance(inst, a, b))
        steps = {v(a, b, s): -M for s in range(1, n + 1)}
        if variant == "base":
            model.add_constr(
                _arc("seq", a, b),
                {f"t_{_lab(b)}": 1, f"t_{_lab(a)}": -1, **steps},
                ">=", d - M)
        else:
            model.add_constr(
                _arc("seq_lo", a, b),
                {f"t_{_lab(b)}": 1, f"t_{_lab(a)}": -1,
                 _arc("w", a, b): -1, **steps},
                ">=", d - M)
            model.add_constr(
                _arc("seq_hi", a, b),
                {f"t_{_lab(b)}": 1, f"t_{_lab(a)}": -1, _arc("w", a, b): -1,
                 **{k: M for k in steps}},
                "<=", d + M)

    for j in range(2, m + 1):
        # entering U_j at a later step than L_j forces the same-cycle flag
        coeffs: dict[str, Number] = {}
        for a in acts:
            for s in range(1, n + 1):
                if a != _U(j):
                    coeffs[v(a, _U(j), s)] = s
        for a in acts:
            for s in range(1, n + 1):
                if a != L(j):
                    coeffs[v(a, L(j), s)] = coeffs.get(v(a, L(j), s), 0) - s
        coeffs[f"z_{j}"] = -(n - 1)
        model.add_constr(f"poslink_{j}", coeffs, "<=", 0)

    for i in range(1, m + 1):
        s_i = _num(min_separation(inst, i))
        tL, tU, z = f"t_L{i}", f"t_U{i}", f"z_{i}"
        model.add_constr(f"sep_same_{i}", {tU: 1, tL: -1, z: -M},
                         ">=", s_i - M)
        model.add_constr(f"sep_cross_{i}",
                         {tL: 1, tU: -1, "C": -1, z: -s_i}, "<=", -s_i)

    for a in acts:
        if a == L(1):
            continue
        d = _num(distance(inst, a, L(1)))
        if variant == "base":
            model.add_constr(f"close_{_lab(a)}",
                             {"C": 1, f"t_{_lab(a)}": -1, v(a, L(1), n): -d},
                             ">=", 0)
        else:
            model.add_constr(
                f"close_lo_{_lab(a)}",
                {"C": 1, f"t_{_lab(a)}": -1,
                 _arc("w", a, L(1)): -1, v(a, L(1), n): -M},
                ">=", d - M)
            model.add_constr(
                f"close_hi_{_lab(a)}",
                {"C": 1, f"t_{_lab(a)}": -1,
                 _arc("w", a, L(1)): -1, v(a, L(1), n): M},
                "<=", d + M)

    if variant == "waits":
        for a, b in arcs:
            model.add_constr(
                _arc("wcap", a, b),
                {_arc("w", a, b): 1,
                 **{v(a, b, s): -M for s in range(1, n + 1)}},
                "<=", 0)

    if cuts:
        model.add_constr(
            "travel_lb",
            {"C": 1, **{v(a, b, s): -_num(distance(inst, a, b))
                        for a, b in arcs for s in range(1, n + 1)}},
            ">=", 0)
        ret = _return_bounds(inst)
        for a in acts:
            if a == L(1):
                continue
            model.add_constr(
                f"return_{_lab(a)}",
                {"C": 1, f"t_{_lab(a)}": -1,
                 **{v(a, b, s): -(_num(distance(inst, a, b)) + ret[b])
                    for b in acts if b != a for s in range(1, n + 1)}},
                ">=", 0)
        model.metadata["cuts"] = True

    if objective == "cycle":
        model.set_objective({"C": 1})
    else:
        obj: dict[str, Number] = {}
        for a, b in arcs:
            d = _num(distance(inst, a, b))
            for s in range(1, n + 1):
                obj[v(a, b, s)] = d
            obj[_arc("w", a, b)] = 1
        model.set_objective(obj)
    return model


def build_flow(inst: CellInstance, cuts: bool = False) -> MilpModel:
    """Flow formulation: arc flow into an activity carries its completion.

    Waiting is itself a flow on the used arc, capped by the largest
    processing time, so timing needs no big-M rows beyond the arc caps.
    ``cuts=True`` adds the same travel and shortest-return rows as the
    other builders, phrased over the flow totals.
    """
    m = inst.m
    acts = activities(m)
    arcs = _arcs(m)
    M = _big_m_value(inst)
    p_cap = _num(max(inst.proc))
    model = MilpModel(name=f"flow_m{m}",
                      metadata=_metadata(inst, "flow", "flow", "cycle"))

    for a, b in arcs:
        model.add_var(_arc("x", a, b), kind=BINARY)
    for a, b in arcs:
        model.add_var(_arc("t", a, b))
    for a, b in arcs:
        model.add_var(_arc("w", a, b))
    for i in range(2, m + 1):
        model.add_var(f"z_{i}", kind=BINARY)

    for b in acts:
        model.add_constr(f"in_{_lab(b)}",
                         {_arc("x", a, b): 1 for a in acts if a != b}, "=", 1)
    for a in acts:
        model.add_constr(f"out_{_lab(a)}",
                         {_arc("x", a, b): 1 for b in acts if b != a}, "=", 1)

    for a, b in arcs:
        model.add_constr(_arc("tcap", a, b),
                         {_arc("t", a, b): 1, _arc("x", a, b): -M}, "<=", 0)
        # a wait never exceeds one full processing window
        model.add_constr(_arc("wcap", a, b),
                         {_arc("w", a, b): 1, _arc("x", a, b): -p_cap},
                         "<=", 0)

    for a in acts:
        coeffs: dict[str, Number] = {}
        for b in acts:
            if b == a:
                continue
            coeffs[_arc("t", a, b)] = 1
            coeffs[_arc("w", a, b)] = -1
            coeffs[_arc("x", a, b)] = -_num(distance(inst, a, b))
        if a == L(1):
            model.add_constr("bal_L1", coeffs, "=", 0)
        else:
            for k in acts:
                if k != a:
                    coeffs[_arc("t", k, a)] = -1
            model.add_constr(f"bal_{_lab(a)}", coeffs, "=", 0)

    def into(prefix: str, b: Activity) -> dict[str, Number]:
        return {_arc(prefix, a, b): 1 for a in acts if a != b}

    for i in range(2, m + 1):
        s_i = _num(min_separation(inst, i))
        z = f"z_{i}"
        cu, cl = into("t", _U(i)), into("t", L(i))
        model.add_constr(f"zlink_{i}",
                         {**cu, **{k: -1 for k in cl}, z: -M}, "<=", 0)
        model.add_constr(f"sep_same_{i}",
                         {**cu, **{k: -1 for k in cl}, z: -M}, ">=", s_i - M)
        cross = {**cl, **{k: -1 for k in cu}}
        for k in into("t", L(1)):
            cross[k] = cross.get(k, 0) - 1
        cross[z] = -s_i
        model.add_constr(f"sep_cross_{i}", cross, "<=", -s_i)

    model.add_constr("m1_window", into("t", _U(1)), ">=",
                     _num(min_separation(inst, 1)))

    if cuts:
        cycle = into("t", L(1))
        model.add_constr(
            "travel_lb",
            {**cycle, **{_arc("x", a, b): -_num(distance(inst, a, b))
                         for a, b in arcs}},
            ">=", 0)
        ret = _return_bounds(inst)
        for a in acts:
            if a == L(1):
                continue
            coeffs = dict(cycle)
            coeffs.update({k: -1 for k in into("t", a)})
            for b in acts:
                if b != a:
                    coeffs[_arc("x", a, b)] = -(_num(distance(inst, a, b))
                                                + ret[b])
            model.add_constr(f"return_{_lab(a)}", coeffs, ">=", 0)
        model.metadata["cuts"] = True

    model.set_objective(into("t", L(1)))
    return model


_BUILDERS = {"mtz": build_mtz, "vajda": build_vajda, "flow": build_flow}


def build_model(inst: CellInstance, formulation: str, variant: str = "base",
                objective: str = "cycle", cuts: bool = False) -> MilpModel:
    """Dispatch to a formulation builder by tag."""
    if formulation not in _BUILDERS:
        raise ModelError(f"unknown formulation {formulation!r}")
    if formulation == "flow":
        return build_flow(inst, cuts=cuts)
    return _BUILDERS[formulation](inst, variant=variant, objective=objective,
                                  cuts=cuts)


# ---------------------------------------------------------------------------
# order -> assignment encoding (warm starts)
# ---------------------------------------------------------------------------

def _flow_waits(inst: CellInstance, sched, p_cap: float) -> list[float]:
    """Distribute the order's slack over arcs within the per-arc wait cap.

    The earliest schedule may pile all slack onto one arc; the flow model
    caps each arc's wait, so re-spread the same total by a small LP over
    the chain windows.
    """
    import numpy as np

    from ..engine.simplex import solve_bounded

    arcs = sched.waits()
    k = len(arcs)
    dists = [float(distance(inst, a, b)) for a, b, _ in arcs]
    C = float(sched.cycle_time)
    pos = {L(1): 0}
    for idx, (_, b, _) in enumerate(arcs[:-1]):
        pos[b] = idx + 1

    # one row per machine window that still needs waiting time, plus the
    # total-slack equality; each >= row carries its own surplus column
    ge_rows: list[np.ndarray] = []
    ge_rhs: list[float] = []
    for i in range(1, inst.m + 1):
        s_i = float(min_separation(inst, i))
        pl, pu = pos[L(i)], pos[_U(i)]
        row = np.zeros(k)
        if pl < pu:  # same cycle: arcs pl..pu-1 span load to unload
            row[pl:pu] = 1.0
            base = sum(dists[pl:pu])
        else:  # cross cycle: the window wraps through the cycle end
            row[pl:] = 1.0
            row[:pu] = 1.0
            base = sum(dists[pl:]) + sum(dists[:pu])
        if base < s_i:
            ge_rows.append(row)
            ge_rhs.append(s_i - base)
    cols = k + len(ge_rows)
    full = np.zeros((1 + len(ge_rows), cols))
    b = np.zeros(1 + len(ge_rows))
    full[0, :k] = 1.0
    b[0] = C - sum(dists)
    for r, (row, need) in enumerate(zip(ge_rows, ge_rhs), start=1):
        full[r, :k] = row
        full[r, k + r - 1] = -1.0
        b[r] = need
    lo = np.concatenate([np.zeros(k), np.zeros(len(ge_rows))])
    hi = np.concatenate([np.full(k, float(p_cap)),
                         np.full(len(ge_rows), np.inf)])
    res = solve_bounded(np.zeros(cols), full, b, lo, hi)
    if res.status != "optimal":
        raise ModelError(
            "no wait distribution fits the per-arc processing-time cap")
    return [float(v) for v in res.x[:k]]


def encode_order(model: MilpModel, order) -> dict[str, float]:
    """Map a cycle order to a full variable assignment for ``model``.

    The timing comes from the order's optimal evaluation, so the
    assignment is feasible and scores the order's true cycle time.
    """
    meta = model.metadata
    form = meta.get("formulation")
    if form not in _BUILDERS:
        raise ModelError("model metadata carries no known formulation tag")
    inst = load_instance(meta["instance"])
    want = meta.get("instance_hash")
    if want is not None and instance_hash(inst) != want:
        raise ModelError("model metadata is inconsistent: instance hash mismatch")
    sched = evaluate_cycle(inst, order)
    order = sched.order
    seq = [L(1), *order.sequence]
    succ = {seq[i]: seq[(i + 1) % len(seq)] for i in range(len(seq))}
    positions = {a: i for i, a in enumerate(seq)}
    n = 2 * inst.m

    assign: dict[str, float] = {v.name: 0.0 for v in model.variables}
    C = float(sched.cycle_time)

    if form == "flow":
        p_cap = float(max(inst.proc))
        wait_list = sched.waits()
        if all(float(w) <= p_cap + 1e-9 for _, _, w in wait_list):
            flow_w = [float(w) for _, _, w in wait_list]
        else:
            flow_w = _flow_waits(inst, sched, p_cap)
        t_run = 0.0
        for (a, b, _), w in zip(wait_list, flow_w):
            t_run += float(distance(inst, a, b)) + w
            assign[_arc("x", a, b)] = 1.0
            assign[_arc("t", a, b)] = t_run
            assign[_arc("w", a, b)] = w
        for i in range(2, inst.m + 1):
            assign[f"z_{i}"] = 1.0 if positions[L(i)] < positions[_U(i)] else 0.0
    else:
        for a in seq:
            assign[f"t_{_lab(a)}"] = 0.0 if a == L(1) else float(sched.completion[a])
        assign["C"] = C
        for i in range(1, inst.m + 1):
            assign[f"z_{i}"] = 1.0 if positions[L(i)] < positions[_U(i)] else 0.0

        if form == "mtz":
            for a, b in succ.items():
                assign[_arc("x", a, b)] = 1.0
        else:
            for s, a in enumerate(seq, start=1):
                assign[f"v_{_lab(a)}_{_lab(succ[a])}_{s}"] = 1.0

        if meta.get("variant") == "waits":
            for a, b, w in sched.waits():
                assign[_arc("w", a, b)] = float(w)

    gap = model.constraint_violation(assign)
    if gap > 1e-6:
        # the tight big-M equals the reference order's cycle time, so
        # orders slower than that reference fall outside the model
        raise ModelError(
            f"order {order} (cycle time {C}) cannot be encoded: worst "
            f"constraint violation {gap:.6g}; the model's big-M admits "
            "only orders at least as fast as the bound order")
    return assign
