"""Compare the compiled search kernel against the pure-Python twin.

Runs the exact solver twice per instance, once per kernel, checks the
optima agree, and prints nodes, wall seconds, and the speedup.  The
compiled kernel is optional; when the build skipped it the script says
so and exits cleanly.

Usage: python benchmarks/bench_kernels.py [--heavy]
"""

from __future__ import annotations

import argparse
import time

from robocell.cell import CellInstance
from robocell.exact import KERNEL, SearchOptions, solve_exact

CASES = [
    (3, 50),
    (4, 0),
    (4, 125),
    (5, 125),
]
HEAVY_CASES = [
    (5, 0),
    (6, 125),
]


def run(kernel: str, inst: CellInstance) -> tuple[float, float, int]:
    t0 = time.perf_counter()
    res = solve_exact(inst, SearchOptions(kernel=kernel))
    dt = time.perf_counter() - t0
    return float(res.cycle_time), dt, res.nodes


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--heavy", action="store_true",
                        help="add the slow pure-Python cases")
    args = parser.parse_args()

    if KERNEL != "compiled":
        print("compiled kernel not available in this build; "
              "nothing to compare")
        return 0

    cases = CASES + (HEAVY_CASES if args.heavy else [])
    header = f"{'cell':>12} {'nodes':>12} {'compiled':>10} {'python':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for m, p in cases:
        inst = CellInstance.uniform(m, 1, 2, p)
        c_fast, t_fast, nodes = run("compiled", inst)
        c_slow, t_slow, nodes_py = run("python", inst)
        if c_fast != c_slow or nodes != nodes_py:
            raise SystemExit(
                f"kernel disagreement at m={m} p={p}: "
                f"compiled ({c_fast}, {nodes} nodes) vs "
                f"python ({c_slow}, {nodes_py} nodes)")
        speedup = t_slow / t_fast if t_fast > 0 else float("inf")
        print(f"{f'm={m} p={p}':>12} {nodes:>12} {t_fast:>9.3f}s "
              f"{t_slow:>9.3f}s {speedup:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
