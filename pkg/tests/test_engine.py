"""Engine self-checks: simplex vs a textbook tableau, B&B vs brute force."""

from __future__ import annotations

import itertools
import random

import numpy as np
import pytest

from robocell.engine.branch_bound import BnbOptions, solve_lp_relaxation, solve_milp
from robocell.engine.simplex import solve_bounded
from robocell.milp.model import BINARY, MilpModel

_TOL = 1e-9


def reference_simplex(c, A, b, lo, hi):
    """Dense two-phase tableau simplex with Bland's rule.

    Independent check for ``solve_bounded``: full tableau instead of a
    revised method, Bland pivoting instead of Dantzig, and bounds are
    compiled away (shift to u = x - lo >= 0, one slack row per upper
    bound) instead of handled implicitly.  Requires finite bounds.
    Returns (status, objective).
    """
    A = np.asarray(A, float)
    c = np.asarray(c, float)
    b = np.asarray(b, float)
    lo = np.asarray(lo, float)
    hi = np.asarray(hi, float)
    m, n = A.shape
    if np.any(lo > hi):
        return "infeasible", float("nan")

    ub = hi - lo
    rows = np.vstack([
        np.hstack([A, np.zeros((m, n))]),
        np.hstack([np.eye(n), np.eye(n)]),
    ])
    rhs = np.concatenate([b - A @ lo, ub])
    total = m + n
    neg = rhs < 0
    rows[neg] *= -1
    rhs[neg] *= -1

    width = 2 * n + total
    T = np.zeros((total + 1, width + 1))
    T[:total, : 2 * n] = rows
    T[:total, 2 * n : width] = np.eye(total)
    T[:total, -1] = rhs
    basis = list(range(2 * n, width))
    T[-1, : 2 * n] = -rows.sum(axis=0)  # phase 1: minimize artificial sum
    T[-1, -1] = -rhs.sum()

    def pivot(limit):
        while True:
            col = next((j for j in range(limit) if T[-1, j] < -1e-9), None)
            if col is None:
                return True
            ratios = [
                (T[i, -1] / T[i, col], basis[i], i)
                for i in range(total)
                if T[i, col] > 1e-11
            ]
            if not ratios:
                return False  # unbounded direction
            _, _, row = min(ratios)
            T[row] /= T[row, col]
            for i in range(total + 1):
                if i != row and T[i, col] != 0:
                    T[i] -= T[i, col] * T[row]
            basis[row] = col

    pivot(2 * n)
    if T[-1, -1] < -1e-7:
        return "infeasible", float("nan")

    for i in range(total):  # drive leftover artificials out of the basis
        if basis[i] >= 2 * n:
            col = next((j for j in range(2 * n) if abs(T[i, j]) > 1e-9), None)
            if col is None:
                continue  # redundant row
            T[i] /= T[i, col]
            for k in range(total + 1):
                if k != i and T[k, col] != 0:
                    T[k] -= T[k, col] * T[i]
            basis[i] = col

    T[-1, :] = 0.0
    T[-1, :n] = c
    for i in range(total):
        if basis[i] < 2 * n:
            T[-1] -= T[-1, basis[i]] * T[i]
    if not pivot(2 * n):
        return "unbounded", float("nan")
    return "optimal", -T[-1, -1] + float(c @ lo)


def _random_lp(rng: random.Random):
    n = rng.randint(2, 6)
    m = rng.randint(1, min(3, n - 1))
    A = np.array([[rng.randint(-4, 4) for _ in range(n)] for _ in range(m)], float)
    lo = np.array([rng.randint(-4, 0) for _ in range(n)], float)
    hi = lo + np.array([rng.randint(1, 7) for _ in range(n)], float)
    x0 = np.array([rng.uniform(l, h) for l, h in zip(lo, hi)])
    b = A @ x0  # feasible by construction, bounded by the box
    c = np.array([rng.randint(-5, 5) for _ in range(n)], float)
    return c, A, b, lo, hi


def test_simplex_matches_textbook_reference():
    rng = random.Random(4242)
    solved = 0
    while solved < 200:
        c, A, b, lo, hi = _random_lp(rng)
        want_status, want_obj = reference_simplex(c, A, b, lo, hi)
        got = solve_bounded(c, A, b, lo, hi)
        assert got.status == want_status
        if want_status == "optimal":
            assert abs(got.objective - want_obj) < 1e-8
            assert np.all(A @ got.x - b < 1e-7) and np.all(b - A @ got.x < 1e-7)
            assert np.all(got.x >= lo - 1e-9) and np.all(got.x <= hi + 1e-9)
            solved += 1


def test_simplex_detects_infeasible_systems():
    # x1 + x2 = 5 cannot hold inside the unit box
    res = solve_bounded([1, 1], np.array([[1.0, 1.0]]), [5], [0, 0], [1, 1])
    assert res.status == "infeasible"
    # crossed bounds short-circuit
    res = solve_bounded([1], np.array([[1.0]]), [0], [2], [1])
    assert res.status == "infeasible"


def test_simplex_detects_unbounded_rays():
    inf = float("inf")
    res = solve_bounded([-1, -1], np.array([[1.0, -1.0]]), [0],
                        [0, 0], [inf, inf])
    assert res.status == "unbounded"


def test_simplex_handles_degenerate_ties():
    # transportation with equal supplies: many ties, heavy degeneracy
    A = np.array([
        [1, 1, 0, 0, 0, 0],
        [0, 0, 1, 1, 0, 0],
        [0, 0, 0, 0, 1, 1],
        [1, 0, 1, 0, 1, 0],
        [0, 1, 0, 1, 0, 1],
    ], float)
    b = [1, 1, 1, 2, 1]
    c = [4, 1, 2, 2, 3, 3]
    lo = [0] * 6
    hi = [2] * 6
    res = solve_bounded(c, A, b, lo, hi)
    assert res.status == "optimal"
    status, obj = reference_simplex(c, A, b, lo, hi)
    assert status == "optimal"
    assert abs(res.objective - obj) < 1e-8


def test_simplex_warm_restart_after_bound_change():
    rng = random.Random(77)
    for _ in range(30):
        c, A, b, lo, hi = _random_lp(rng)
        first = solve_bounded(c, A, b, lo, hi)
        if first.status != "optimal":
            continue
        hi2 = hi.copy()
        hi2[rng.randrange(len(hi2))] = (lo[0] + hi[0]) / 2 if False else hi2[0]
        hi2[0] = (lo[0] + hi[0]) / 2  # shrink one bound
        cold = solve_bounded(c, A, b, lo, hi2)
        warm = solve_bounded(c, A, b, lo, hi2,
                             start=(first.basis, first.vstat))
        assert warm.status == cold.status
        if cold.status == "optimal":
            assert abs(warm.objective - cold.objective) < 1e-8


def test_simplex_iteration_cap_raises():
    rng = random.Random(11)
    c, A, b, lo, hi = _random_lp(rng)
    with pytest.raises(RuntimeError):
        solve_bounded(c, A, b, lo, hi, max_iter=1)


# -- branch and bound --------------------------------------------------------

def _random_binary_model(rng: random.Random) -> tuple[MilpModel, float]:
    n = rng.randint(3, 8)
    model = MilpModel(name="knap")
    names = [model.add_var(f"x{i}", kind=BINARY) for i in range(n)]
    for r in range(rng.randint(1, 3)):
        coeffs = {names[i]: rng.randint(-3, 5) for i in range(n)}
        rhs = rng.randint(2, 8)
        model.add_constr(f"cap{r}", coeffs, "<=", rhs)
    obj = {names[i]: rng.randint(-6, 6) for i in range(n)}
    model.set_objective(obj)

    best = float("inf")
    for bits in itertools.product((0, 1), repeat=n):
        ok = all(
            sum(con.coeffs.get(names[i], 0) * bits[i] for i in range(n)) <= con.rhs
            for con in model.constraints
        )
        if ok:
            best = min(best, sum(obj[names[i]] * bits[i] for i in range(n)))
    return model, best


def test_branch_and_bound_matches_brute_force():
    rng = random.Random(505)
    for _ in range(30):
        model, best = _random_binary_model(rng)
        sol = solve_milp(model)
        assert sol.status == "optimal"
        assert sol.objective == pytest.approx(best, abs=1e-7)
        for v in model.variables:
            val = sol.x[v.name]
            assert abs(val - round(val)) < 1e-6


def test_branch_and_bound_detects_infeasible():
    model = MilpModel(name="bad")
    a = model.add_var("a", kind=BINARY)
    b = model.add_var("b", kind=BINARY)
    model.add_constr("lo", {a: 1, b: 1}, ">=", 3)  # two binaries cannot reach 3
    model.set_objective({a: 1})
    assert solve_milp(model).status == "infeasible"


def test_branch_and_bound_root_solves_integral_relaxations():
    # assignment polytopes have integral vertices, so no branching happens
    rng = random.Random(606)
    for _ in range(5):
        k = 3
        model = MilpModel(name="assign")
        cost = {}
        for i in range(k):
            for j in range(k):
                name = model.add_var(f"a{i}{j}", kind=BINARY)
                cost[name] = rng.randint(1, 9)
        for i in range(k):
            model.add_constr(f"row{i}", {f"a{i}{j}": 1 for j in range(k)}, "=", 1)
            model.add_constr(f"col{i}", {f"a{j}{i}": 1 for j in range(k)}, "=", 1)
        model.set_objective(cost)
        sol = solve_milp(model)
        best = min(
            sum(cost[f"a{i}{perm[i]}"] for i in range(k))
            for perm in itertools.permutations(range(k))
        )
        assert sol.status == "optimal"
        assert sol.objective == pytest.approx(best, abs=1e-9)
        assert sol.nodes == 1


def test_branch_and_bound_node_limit_reports_limit():
    rng = random.Random(707)
    model, _best = _random_binary_model(rng)
    sol = solve_milp(model, options=BnbOptions(node_limit=0))
    assert sol.status == "limit"


def test_lp_relaxation_helpers():
    model = MilpModel(name="tiny")
    x = model.add_var("x", lo=0, hi=4, kind=BINARY)
    y = model.add_var("y", lo=0, hi=3)
    model.add_constr("mix", {x: 1, y: 1}, "<=", 2.5)
    model.set_objective({x: -1, y: -1})
    rel = solve_lp_relaxation(model)
    assert rel.status == "optimal"
    assert rel.objective == pytest.approx(-2.5, abs=1e-9)
    sol = solve_milp(model)
    assert sol.objective == pytest.approx(-2.5, abs=1e-9)  # y carries the half
