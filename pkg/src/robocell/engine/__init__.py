"""Built-in LP/MILP engine: bounded-variable simplex and branch-and-bound."""

from .branch_bound import (
    BnbOptions,
    MilpSolution,
    relaxation_value,
    solve_lp_relaxation,
    solve_milp,
    warm_start,
)
from .simplex import LpResult, solve_bounded, solve_dense_exact

__all__ = [
    "BnbOptions",
    "LpResult",
    "MilpSolution",
    "relaxation_value",
    "solve_bounded",
    "solve_dense_exact",
    "solve_lp_relaxation",
    "solve_milp",
    "warm_start",
]
