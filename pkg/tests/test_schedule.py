"""Schedule evaluation: order parsing, waits, pairing, timelines, JSON."""

from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest

from robocell.cell import CellInstance, L, U, activities, canonical_order, distance
from robocell.schedule import (
    CycleOrder,
    InvalidOrderError,
    evaluate_cycle,
    schedule_to_json,
    timeline,
)


def _random_order(rng: random.Random, m: int) -> tuple:
    acts = [a for a in activities(m) if a != L(1)]
    return tuple(rng.sample(acts, len(acts)))


def test_parse_round_trip():
    order = CycleOrder.parse("L2 U1 U2", 2)
    assert order.sequence == (L(2), U(1), U(2))
    assert CycleOrder.parse(order.to_text(), 2) == order


def test_parse_infers_m():
    order = CycleOrder.parse("U1 L2 U2 L3 U3")
    assert order.m == 3


def test_parse_rejects_bad_orders():
    for text, m in [
        ("L2 U1", 2),            # missing U2
        ("L2 U1 U2 U2", 2),      # repeat
        ("L1 L2 U1 U2", 2),      # anchor must stay implicit
        ("L2 U1 U3", 2),         # activity outside the cell
        ("", 2),
    ]:
        with pytest.raises(InvalidOrderError):
            CycleOrder.parse(text, m)


def test_evaluate_accepts_text_sequence_and_order():
    inst = CellInstance.uniform(3, 1, 2, 40)
    seq = (L(2), L(3), U(1), U(2), U(3))
    by_text = evaluate_cycle(inst, "L2 L3 U1 U2 U3")
    by_seq = evaluate_cycle(inst, seq)
    by_order = evaluate_cycle(inst, CycleOrder(3, seq))
    assert by_text.cycle_time == by_seq.cycle_time == by_order.cycle_time


def test_canonical_zero_processing_has_no_wait():
    for m in (2, 4, 6):
        inst = CellInstance.uniform(m, 1, 2, 0)
        sched = evaluate_cycle(inst, canonical_order(m))
        assert sched.total_wait == 0
        assert sched.cycle_time == sched.travel_time


def test_cycle_time_splits_into_travel_plus_wait():
    rng = random.Random(77)
    for _ in range(80):
        m = rng.randint(2, 5)
        inst = CellInstance(m, rng.randint(1, 3), rng.randint(1, 4),
                            tuple(rng.randint(0, 90) for _ in range(m)))
        sched = evaluate_cycle(inst, _random_order(rng, m))
        waits = sched.waits()
        assert all(w >= 0 for _, _, w in waits)
        assert sched.total_wait == sum(w for _, _, w in waits)
        assert sched.cycle_time == sched.travel_time + sched.total_wait


def test_travel_time_is_the_distance_sum():
    rng = random.Random(13)
    inst = CellInstance.uniform(4, 2, 3, 30)
    seq = _random_order(rng, 4)
    sched = evaluate_cycle(inst, seq)
    chain = (L(1),) + seq + (L(1),)
    total = sum(distance(inst, a, b) for a, b in zip(chain, chain[1:]))
    assert sched.travel_time == total


def test_pairing_flags_follow_positions():
    inst = CellInstance.uniform(3, 1, 2, 25)
    sched = evaluate_cycle(inst, "U2 L2 U1 L3 U3")
    # machine 2 unloads before reloading, so its pair crosses the cycle;
    # machine 1 can never cross because the anchor load sits at position 0
    assert sched.pairing == {1: 1, 2: 0, 3: 1}


def test_graph_and_lp_methods_agree():
    rng = random.Random(29)
    for _ in range(120):
        m = rng.randint(2, 5)
        inst = CellInstance(m, rng.randint(1, 2), rng.randint(1, 3),
                            tuple(rng.randint(0, 70) for _ in range(m)))
        order = _random_order(rng, m)
        a = evaluate_cycle(inst, order, method="graph").cycle_time
        b = evaluate_cycle(inst, order, method="lp").cycle_time
        assert a == b


def test_unknown_method_rejected():
    inst = CellInstance.uniform(2, 1, 2, 0)
    with pytest.raises(ValueError):
        evaluate_cycle(inst, "L2 U1 U2", method="magic")


def test_separation_respected_in_completion_times():
    rng = random.Random(41)
    for _ in range(40):
        m = rng.randint(2, 4)
        inst = CellInstance(m, rng.randint(1, 2), rng.randint(1, 3),
                            tuple(rng.randint(0, 60) for _ in range(m)))
        sched = evaluate_cycle(inst, _random_order(rng, m))
        comp = sched.completion
        c = sched.cycle_time
        for i in range(1, m + 1):
            gap = comp[U(i)] - comp[L(i)]
            if sched.pairing[i] == 0:
                gap += c  # unload serves the previous cycle's load
            sep = 2 * inst.epsilon + (m + 1 - i) * inst.delta + inst.proc[i - 1]
            assert gap >= sep


def test_timeline_is_contiguous_and_spans_the_cycle():
    rng = random.Random(59)
    for _ in range(25):
        m = rng.randint(2, 4)
        inst = CellInstance(m, rng.randint(1, 2), rng.randint(1, 3),
                            tuple(rng.randint(0, 50) for _ in range(m)))
        sched = evaluate_cycle(inst, _random_order(rng, m))
        segs = timeline(inst, sched)
        assert segs[0]["start"] == 0
        assert segs[-1]["end"] == sched.cycle_time
        for prev, cur in zip(segs, segs[1:]):
            assert prev["end"] == cur["start"]
        for seg in segs:
            assert seg["action"] in ("move", "pick", "place", "wait")
            assert seg["end"] > seg["start"]


def test_schedule_json_shape():
    inst = CellInstance.uniform(2, 1, 2, 10)
    sched = evaluate_cycle(inst, "U1 L2 U2")
    doc = schedule_to_json(inst, sched)
    assert doc["v"] == 1
    assert doc["order"] == "U1 L2 U2"
    assert doc["cycle_time"] == sched.cycle_time
    assert "timeline" not in doc
    json.dumps(doc)  # everything must already be JSON-ready

    full = schedule_to_json(inst, sched, include_timeline=True)
    assert len(full["timeline"]) == len(timeline(inst, sched))
    json.dumps(full)


def test_fractional_instance_is_exact():
    inst = CellInstance(2, Fraction(1, 2), Fraction(1, 3),
                        (Fraction(5, 7), Fraction(2, 3)))
    sched = evaluate_cycle(inst, canonical_order(2))
    assert isinstance(sched.cycle_time, (int, Fraction))
    again = evaluate_cycle(inst, canonical_order(2), method="lp")
    assert again.cycle_time == sched.cycle_time
