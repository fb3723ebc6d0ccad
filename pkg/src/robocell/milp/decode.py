"""Recover the activity order behind a solved model's variable values.

Every formulation encodes the same object, a single closed tour over the
2m activities, but stores it differently: the completion-time and flow
models pick one successor arc per activity, the step-indexed model picks
one move per step.  Decoding walks that structure back into a
:class:`~robocell.schedule.CycleOrder` and re-evaluates it, so the
returned schedule is exact regardless of how loose the model's timing
variables were.
"""

from __future__ import annotations

from typing import Mapping

from ..cell import Activity, L, activities, load_instance
from ..schedule import CycleOrder, Schedule, evaluate_cycle
from .model import MilpModel

__all__ = ["DecodeError", "decode_order", "decode_solution", "solution_values"]

_TOL = 1e-6


class DecodeError(ValueError):
    """The solution values do not describe one closed activity tour."""


def solution_values(sol) -> Mapping[str, float]:
    """Accept either a name->value mapping or a solution carrying one."""
    if isinstance(sol, Mapping):
        return sol
    x = getattr(sol, "x", None)
    if isinstance(x, Mapping):
        return x
    raise TypeError(
        "expected a {variable: value} mapping or an object with an .x mapping"
    )


def _lab(a: Activity) -> str:
    return f"{a.kind}{a.machine}"


def _on(values: Mapping[str, float], name: str) -> bool:
    # arc binaries must sit at 0 or 1; anything in between is not a tour
    val = float(values.get(name, 0.0))
    if abs(val) <= _TOL:
        return False
    if abs(val - 1.0) <= _TOL:
        return True
    raise DecodeError(f"{name} = {val:.6g} is fractional")


def _successor_walk(m: int, values: Mapping[str, float]) -> CycleOrder:
    acts = activities(m)
    succ: dict[Activity, Activity] = {}
    for a in acts:
        chosen = [b for b in acts
                  if b != a and _on(values, f"x_{_lab(a)}_{_lab(b)}")]
        if not chosen:
            raise DecodeError(f"no successor arc chosen out of {a}")
        if len(chosen) > 1:
            raise DecodeError(
                f"{a} has {len(chosen)} successors: "
                + " ".join(str(b) for b in chosen))
        succ[a] = chosen[0]
    seq: list[Activity] = []
    seen = {L(1)}
    cur = succ[L(1)]
    while cur != L(1):
        if cur in seen:
            raise DecodeError(f"arcs revisit {cur} before closing the tour")
        seen.add(cur)
        seq.append(cur)
        cur = succ[cur]
    if len(seq) != 2 * m - 1:
        raise DecodeError(
            f"subtour: the cycle through L1 covers {len(seq) + 1} of "
            f"{2 * m} activities")
    return CycleOrder(m, seq)


def _step_walk(m: int, values: Mapping[str, float]) -> CycleOrder:
    n = 2 * m
    acts = activities(m)
    seq: list[Activity] = []
    pos = L(1)
    for s in range(1, n + 1):
        moves = [(a, b) for a in acts for b in acts
                 if b != a and _on(values, f"v_{_lab(a)}_{_lab(b)}_{s}")]
        if len(moves) != 1:
            raise DecodeError(
                f"step {s} selects {len(moves)} moves instead of one")
        a, b = moves[0]
        if a != pos:
            raise DecodeError(
                f"step {s} departs {a} but the tour stands at {pos}")
        if s < n:
            if b == L(1):
                raise DecodeError(f"the tour closes early at step {s} of {n}")
            seq.append(b)
        elif b != L(1):
            raise DecodeError(f"the last step enters {b}, not L1")
        pos = b
    return CycleOrder(m, seq)


def decode_order(model: MilpModel, sol) -> CycleOrder:
    """Extract the activity order a solution's binaries encode."""
    values = solution_values(sol)
    form = model.metadata.get("formulation")
    inst = load_instance(model.metadata["instance"])
    if form in ("mtz", "flow"):
        return _successor_walk(inst.m, values)
    if form == "vajda":
        return _step_walk(inst.m, values)
    raise DecodeError(f"cannot decode formulation {form!r}")


def decode_solution(model: MilpModel, sol) -> tuple[CycleOrder, Schedule]:
    """Decode a solved model into its order and exact earliest schedule.

    The schedule comes from re-evaluating the decoded order, not from the
    model's timing variables, so its cycle time is the true minimum for
    that order.  For cycle-length objectives the two agree at integer
    solutions; the re-evaluation is what downstream code should trust.
    """
    order = decode_order(model, sol)
    inst = load_instance(model.metadata["instance"])
    return order, evaluate_cycle(inst, order)
