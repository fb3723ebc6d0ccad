"""Cyclic scheduling toolkit for single-robot flexible cells.

A cell is a line of m machines between an input and an output buffer,
served by one robot; one part is loaded onto and unloaded from every
machine per cycle.  The package models cell geometry (:mod:`.cell`),
evaluates and times activity orders (:mod:`.schedule`), proves optimal
orders by pruned search (:mod:`.exact`), builds three MILP formulations
of the same problem (:mod:`.milp`), solves them with a built-in
branch-and-bound over a bounded-variable simplex (:mod:`.engine`), and
reproduces the reference benchmark grid (:mod:`.bench`, ``robocell`` CLI).
"""

from .cell import (
    Activity,
    CellInstance,
    InstanceError,
    L,
    U,
    activities,
    big_m,
    canonical_order,
    distance,
    instance_hash,
    load_instance,
    min_separation,
)
from .exact import (
    KERNEL,
    SearchLimit,
    SearchOptions,
    SolveResult,
    enumerate_exact,
    prefix_bound,
    solve_exact,
)
from .schedule import (
    CycleOrder,
    InvalidOrderError,
    Schedule,
    evaluate_cycle,
    schedule_to_json,
    timeline,
    waits,
)

__version__ = "0.1.0"

__all__ = [
    "Activity",
    "CellInstance",
    "CycleOrder",
    "InstanceError",
    "InvalidOrderError",
    "KERNEL",
    "L",
    "Schedule",
    "SearchLimit",
    "SearchOptions",
    "SolveResult",
    "U",
    "activities",
    "big_m",
    "canonical_order",
    "distance",
    "enumerate_exact",
    "evaluate_cycle",
    "instance_hash",
    "load_instance",
    "min_separation",
    "prefix_bound",
    "schedule_to_json",
    "solve_exact",
    "timeline",
    "waits",
    "__version__",
]
