"""Cell model: activities, distances, separations, big-M, instance I/O."""

from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest

from robocell.cell import (
    Activity,
    CellInstance,
    InstanceError,
    L,
    U,
    activities,
    big_m,
    canonical_order,
    distance,
    load_instance,
    min_separation,
)
from robocell.schedule import evaluate_cycle


def test_activity_parse_and_str():
    assert Activity.parse("L1") == L(1)
    assert Activity.parse(" U3 ") == U(3)
    assert str(U(12)) == "U12"
    for bad in ("", "L", "X2", "L0", "Lx", "2L"):
        with pytest.raises(ValueError):
            Activity.parse(bad)


def test_activities_enumeration():
    acts = activities(3)
    assert list(acts) == [L(1), L(2), L(3), U(1), U(2), U(3)]
    assert len(activities(7)) == 14


def test_canonical_order_shape():
    order = canonical_order(4)
    assert list(order) == [L(2), L(3), L(4), U(1), U(2), U(3), U(4)]
    # the anchor load is implicit, so 2m-1 activities remain
    assert len(canonical_order(6)) == 11


def test_distance_closed_forms():
    rng = random.Random(101)
    for _ in range(50):
        m = rng.randint(1, 6)
        eps, dlt = rng.randint(1, 5), rng.randint(1, 5)
        inst = CellInstance.uniform(m, eps, dlt, rng.randint(0, 99))
        i, j = rng.randint(1, m), rng.randint(1, m)
        if i != j:
            assert distance(inst, L(i), L(j)) == 2 * eps + (i + j) * dlt
            assert distance(inst, U(i), U(j)) == (
                2 * eps + 2 * (m + 1 - j) * dlt)
        assert distance(inst, U(i), L(j)) == 2 * eps + (m + 1 + j) * dlt
        assert distance(inst, L(i), U(j)) == (
            2 * eps + (abs(i - j) + m + 1 - j) * dlt)


def test_distance_ignores_processing_time():
    a = CellInstance.uniform(3, 1, 2, 0)
    b = CellInstance.uniform(3, 1, 2, 250)
    for x in activities(3):
        for y in activities(3):
            if x != y:
                assert distance(a, x, y) == distance(b, x, y)


def test_min_separation_closed_form():
    inst = CellInstance(4, 2, 3, (5, 11, 0, 40))
    for i in range(1, 5):
        assert min_separation(inst, i) == 2 * 2 + (5 - i) * 3 + inst.proc[i - 1]


def test_big_m_reference_values():
    # spot values from the uniform benchmark family
    assert big_m(CellInstance.uniform(4, 1, 2, 0)) == 108
    assert big_m(CellInstance.uniform(4, 1, 2, 250)) == 316
    assert big_m(CellInstance.uniform(5, 1, 2, 100)) == 192
    assert big_m(CellInstance.uniform(6, 1, 2, 0)) == 212
    assert big_m(CellInstance.uniform(6, 1, 2, 250)) == 372


def test_big_m_exceeds_canonical_cycle_time_by_fixed_slack():
    # the constant is canonical cycle time + 2(m-1)*delta, so it is a
    # valid horizon for every canonical schedule and exact only at m=1
    rng = random.Random(5)
    for _ in range(40):
        m = rng.randint(1, 6)
        eps, dlt = rng.randint(1, 3), rng.randint(1, 4)
        inst = CellInstance.uniform(m, eps, dlt, rng.randint(0, 250))
        c_can = evaluate_cycle(inst, canonical_order(m)).cycle_time
        assert big_m(inst) == c_can + 2 * (m - 1) * dlt


def test_big_m_requires_uniform_processing():
    with pytest.raises(InstanceError):
        big_m(CellInstance(3, 1, 2, (5, 5, 6)))


def test_canonical_cycle_time_closed_form():
    rng = random.Random(23)
    for _ in range(60):
        m = rng.randint(1, 6)
        eps, dlt = rng.randint(1, 3), rng.randint(1, 4)
        p = rng.randint(0, 250)
        inst = CellInstance.uniform(m, eps, dlt, p)
        got = evaluate_cycle(inst, canonical_order(m)).cycle_time
        slack = p - 2 * (m - 1) * eps - (m * m + m - 2) * dlt
        want = 2 * m * (m + 1) * dlt + 4 * m * eps + max(0, slack)
        assert got == want


def test_instance_validation():
    with pytest.raises(InstanceError):
        CellInstance(0, 1, 2, ())
    with pytest.raises(InstanceError):
        CellInstance(2, 0, 2, (1, 1))  # epsilon must be positive
    with pytest.raises(InstanceError):
        CellInstance(2, 1, -1, (1, 1))
    with pytest.raises(InstanceError):
        CellInstance(2, 1, 2, (1, -3))
    with pytest.raises(InstanceError):
        CellInstance(2, 1, 2, (1, 2, 3))  # proc length must equal m


def test_uniform_p_property():
    assert CellInstance(3, 1, 2, (7, 7, 7)).uniform_p == 7
    assert CellInstance(3, 1, 2, (7, 7, 8)).uniform_p is None


def test_load_instance_round_trip(tmp_path):
    inst = CellInstance(3, 1, 2, (5, 0, 12))
    doc = inst.to_json()
    again = load_instance(doc)
    assert again == inst
    again = load_instance(json.dumps(doc))
    assert again == inst
    path = tmp_path / "inst.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    assert load_instance(str(path)) == inst
    assert load_instance(inst) is inst


def test_load_instance_uniform_shorthand():
    inst = load_instance({"m": 4, "epsilon": 1, "delta": 2, "p": 50})
    assert inst == CellInstance.uniform(4, 1, 2, 50)


def test_load_instance_rejects_garbage():
    for bad in ({"m": 2}, '{"m": "x"}', "no/such/file.json"):
        with pytest.raises((InstanceError, ValueError, OSError)):
            load_instance(bad)


def test_fractional_durations_stay_exact():
    inst = CellInstance(2, Fraction(1, 2), Fraction(3, 2), (Fraction(7, 3), 1))
    d = distance(inst, L(1), U(2))
    assert d == 2 * Fraction(1, 2) + (1 + 1) * Fraction(3, 2)
    s = min_separation(inst, 1)
    assert s == 1 + 2 * Fraction(3, 2) + Fraction(7, 3)
    c = evaluate_cycle(inst, canonical_order(2)).cycle_time
    assert isinstance(c, (int, Fraction))
