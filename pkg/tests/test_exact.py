"""Exact search: optima, pruning soundness, bounds, kernels, budgets."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from robocell.cell import CellInstance, L, activities
from robocell.exact import (
    KERNEL,
    SearchLimit,
    SearchOptions,
    enumerate_exact,
    prefix_bound,
    solve_exact,
)
from robocell.schedule import CycleOrder, evaluate_cycle


def _random_instance(rng: random.Random, m: int) -> CellInstance:
    return CellInstance(m, rng.randint(1, 3), rng.randint(1, 4),
                        tuple(rng.randint(0, 60) for _ in range(m)))


def test_known_optima_uniform_family():
    cases = {
        (4, 0): 96,
        (4, 75): 105,
        (4, 250): 274,
        (5, 125): 156,
        (5, 250): 278,
        (6, 175): 212,
    }
    for (m, p), want in cases.items():
        res = solve_exact(CellInstance.uniform(m, 1, 2, p))
        assert res.cycle_time == want
        assert res.proven


def test_result_is_self_consistent():
    inst = CellInstance.uniform(4, 1, 2, 100)
    res = solve_exact(inst)
    sched = evaluate_cycle(inst, res.order)
    assert sched.cycle_time == res.cycle_time
    assert res.schedule.cycle_time == res.cycle_time
    # the warm-start incumbent may already be optimal, leaving no leaves
    assert res.nodes >= res.leaves >= 0


def test_pruned_search_equals_enumeration():
    rng = random.Random(211)
    for _ in range(25):
        m = rng.randint(1, 3)
        inst = _random_instance(rng, m)
        fast = solve_exact(inst, SearchOptions(deterministic=True))
        slow = enumerate_exact(inst)
        assert fast.cycle_time == slow.cycle_time
        assert fast.order == slow.order  # deterministic mode ties break alike


def test_deterministic_mode_returns_least_optimal_order():
    rng = random.Random(97)
    for _ in range(8):
        inst = _random_instance(rng, 3)
        res = solve_exact(inst, SearchOptions(deterministic=True))
        acts = [a for a in activities(3) if a != L(1)]
        optima = [
            perm
            for perm in itertools.permutations(acts)
            if evaluate_cycle(inst, CycleOrder(3, perm)).cycle_time == res.cycle_time
        ]
        assert tuple(res.order.sequence) == min(optima)


def test_enumeration_visits_every_order():
    inst = CellInstance.uniform(3, 1, 2, 10)
    res = enumerate_exact(inst)
    # (2m-1)! complete orders for m=3
    assert res.leaves == 120


def test_prefix_bound_is_admissible_and_tight_at_leaves():
    rng = random.Random(31)
    for _ in range(15):
        m = rng.choice((2, 3))
        inst = _random_instance(rng, m)
        acts = [a for a in activities(m) if a != L(1)]
        seq = rng.sample(acts, len(acts))
        leaf = prefix_bound(inst, seq)
        assert leaf == evaluate_cycle(inst, CycleOrder(m, tuple(seq))).cycle_time
        k = rng.randint(1, len(acts) - 1)
        pre = seq[:k]
        best = min(
            evaluate_cycle(inst, CycleOrder(m, tuple(pre) + rest)).cycle_time
            for rest in itertools.permutations([a for a in acts if a not in pre])
        )
        assert prefix_bound(inst, pre) <= best


def test_prefix_bound_rejects_bad_prefixes():
    inst = CellInstance.uniform(3, 1, 2, 0)
    with pytest.raises(ValueError):
        prefix_bound(inst, [L(2), L(2)])
    with pytest.raises(ValueError):
        prefix_bound(inst, [L(1)])
    with pytest.raises(ValueError):
        prefix_bound(inst, [L(4)])


def test_node_limit_raises_or_returns_partial():
    inst = CellInstance.uniform(5, 1, 2, 0)
    with pytest.raises(SearchLimit):
        solve_exact(inst, SearchOptions(node_limit=10))
    res = solve_exact(inst, SearchOptions(node_limit=10, partial=True))
    assert not res.proven
    assert res.cycle_time >= 140  # incumbent can never beat the optimum


def test_python_kernel_matches_selected_kernel():
    rng = random.Random(67)
    for _ in range(10):
        inst = _random_instance(rng, 3)
        a = solve_exact(inst, SearchOptions(kernel="python", deterministic=True))
        b = solve_exact(inst, SearchOptions(deterministic=True))
        assert a.cycle_time == b.cycle_time
        assert a.order == b.order
        assert a.nodes == b.nodes


@pytest.mark.skipif(KERNEL != "compiled", reason="compiled kernel not built")
def test_compiled_kernel_matches_python_kernel():
    rng = random.Random(83)
    for _ in range(6):
        inst = _random_instance(rng, 4)
        fast = solve_exact(inst, SearchOptions(kernel="compiled"))
        slow = solve_exact(inst, SearchOptions(kernel="python"))
        assert fast.cycle_time == slow.cycle_time
        assert fast.nodes == slow.nodes
        assert fast.kernel == "compiled" and slow.kernel == "python"


def test_worker_sharding_agrees_with_serial():
    inst = CellInstance.uniform(4, 1, 2, 50)
    serial = solve_exact(inst, SearchOptions(deterministic=True))
    sharded = solve_exact(inst, SearchOptions(deterministic=True, workers=3))
    assert sharded.cycle_time == serial.cycle_time
    assert sharded.order == serial.order


def test_single_machine_cell():
    inst = CellInstance.uniform(1, 2, 3, 17)
    res = solve_exact(inst)
    # only one order exists: unload after the anchor load
    assert res.order.to_text() == "U1"
    assert res.cycle_time == evaluate_cycle(inst, "U1").cycle_time


def test_fractional_durations_solved_exactly():
    inst = CellInstance(2, Fraction(1, 2), Fraction(1, 3),
                        (Fraction(5, 7), Fraction(1, 9)))
    res = solve_exact(inst, SearchOptions(deterministic=True))
    slow = enumerate_exact(inst)
    assert res.cycle_time == slow.cycle_time
    assert isinstance(res.cycle_time, (int, Fraction))
