"""Formulation builders: structure, relaxations, encodings, decode, I/O."""

from __future__ import annotations

import io
import random
from collections import Counter

import pytest

from robocell.cell import CellInstance, activities, big_m, canonical_order, min_separation
from robocell.engine.branch_bound import (
    BnbOptions,
    solve_lp_relaxation,
    solve_milp,
    warm_start,
)
from robocell.exact import solve_exact
from robocell.milp.decode import DecodeError, decode_order, decode_solution
from robocell.milp.formulations import build_flow, build_model, build_mtz, build_vajda
from robocell.milp.model import ModelError, read_lp, write_lp
from robocell.schedule import CycleOrder, evaluate_cycle
from robocell.tables import expected_cell, expected_table, table_checksum


def _var_families(model) -> dict:
    return Counter(v.name.split("_")[0] for v in model.variables)


def _random_order(rng: random.Random, m: int) -> CycleOrder:
    from robocell.cell import L

    acts = [a for a in activities(m) if a != L(1)]
    return CycleOrder(m, tuple(rng.sample(acts, len(acts))))


# -- structure ---------------------------------------------------------------

@pytest.mark.parametrize("m", [2, 3])
def test_mtz_variable_families(m):
    n = 2 * m
    arcs = n * (n - 1)
    base = _var_families(build_mtz(CellInstance.uniform(m, 1, 2, 5)))
    assert base == {"x": arcs, "t": n, "C": 1, "z": m}
    waits = _var_families(
        build_mtz(CellInstance.uniform(m, 1, 2, 5), variant="waits"))
    assert waits == {"x": arcs, "t": n, "C": 1, "z": m, "w": arcs}


@pytest.mark.parametrize("m", [2, 3])
def test_vajda_variable_families(m):
    n = 2 * m
    arcs = n * (n - 1)
    fam = _var_families(build_vajda(CellInstance.uniform(m, 1, 2, 5)))
    assert fam == {"v": arcs * n, "t": n, "C": 1, "z": m}


@pytest.mark.parametrize("m", [2, 3])
def test_flow_variable_families(m):
    n = 2 * m
    arcs = n * (n - 1)
    fam = _var_families(build_flow(CellInstance.uniform(m, 1, 2, 5)))
    # machine 1 needs no pairing flag: its window row pins the anchor
    assert fam == {"x": arcs, "t": arcs, "w": arcs, "z": m - 1}


def test_assignment_rows_cover_every_activity():
    inst = CellInstance.uniform(3, 1, 2, 0)
    for form in ("mtz", "flow"):
        model = build_model(inst, form)
        rows = Counter(c.name.split("_")[0] for c in model.constraints)
        assert rows["in"] == 6 and rows["out"] == 6


def test_metadata_records_the_build():
    inst = CellInstance.uniform(3, 1, 2, 25)
    model = build_model(inst, "mtz", variant="waits")
    assert model.metadata["formulation"] == "mtz"
    assert model.metadata["variant"] == "waits"
    assert model.metadata["big_m"] == big_m(inst)
    assert "cuts" not in model.metadata
    strong = build_model(inst, "flow", cuts=True)
    assert strong.metadata["cuts"] is True


def test_unknown_formulation_rejected():
    inst = CellInstance.uniform(2, 1, 2, 0)
    with pytest.raises(ModelError):
        build_model(inst, "dfj")


# -- relaxation values -------------------------------------------------------

def test_base_relaxation_equals_first_separation():
    rng = random.Random(301)
    for _ in range(12):
        m = rng.randint(2, 4)
        inst = CellInstance(m, rng.randint(1, 3), rng.randint(1, 3),
                            tuple(rng.randint(0, 80) for _ in range(m)))
        s1 = float(min_separation(inst, 1))
        for form in ("mtz", "vajda"):
            rel = solve_lp_relaxation(build_model(inst, form))
            assert rel.status == "optimal"
            assert abs(rel.objective - s1) < 1e-7


def test_waits_relaxation_collapses_to_zero():
    inst = CellInstance.uniform(4, 1, 2, 50)
    for form in ("mtz", "vajda"):
        rel = solve_lp_relaxation(build_model(inst, form, variant="waits"))
        assert abs(rel.objective) < 1e-7


def test_unanchored_relaxation_closed_form():
    inst = CellInstance.uniform(4, 1, 2, 50)
    s1 = float(min_separation(inst, 1))
    M = float(big_m(inst))
    rel = solve_lp_relaxation(build_mtz(inst, anchor=False))
    assert abs(rel.objective - s1 * s1 / (2 * M + s1)) < 1e-7


def test_flow_relaxation_equals_travel_closed_form():
    rng = random.Random(302)
    for _ in range(10):
        m = rng.randint(2, 4)
        eps, dlt = rng.randint(1, 3), rng.randint(1, 4)
        inst = CellInstance(m, eps, dlt,
                            tuple(rng.randint(0, 80) for _ in range(m)))
        rel = solve_lp_relaxation(build_model(inst, "flow"))
        assert abs(rel.objective - (2 * m * (m + 1) * dlt + 4 * m * eps)) < 1e-7


def test_cuts_tighten_without_crossing_the_optimum():
    rng = random.Random(303)
    for _ in range(8):
        m = rng.choice((2, 3))
        inst = CellInstance(m, rng.randint(1, 2), rng.randint(1, 3),
                            tuple(rng.randint(0, 50) for _ in range(m)))
        c_star = float(solve_exact(inst).cycle_time)
        for form in ("mtz", "vajda", "flow"):
            plain = solve_lp_relaxation(build_model(inst, form)).objective
            strong = solve_lp_relaxation(build_model(inst, form, cuts=True)).objective
            assert plain <= strong + 1e-7
            assert strong <= c_star + 1e-7


# -- order encodings ---------------------------------------------------------

def test_warm_start_encodings_are_feasible():
    rng = random.Random(304)
    for _ in range(10):
        m = rng.choice((2, 3))
        inst = CellInstance(m, rng.randint(1, 2), rng.randint(1, 3),
                            tuple(rng.randint(0, 40) for _ in range(m)))
        order = _random_order(rng, m)
        for form in ("mtz", "vajda", "flow"):
            for cuts in (False, True):
                model = build_model(inst, form, cuts=cuts)
                x = warm_start(model, order)
                assert model.constraint_violation(x) <= 1e-6


def test_warm_start_decodes_back_to_the_same_order():
    rng = random.Random(305)
    inst = CellInstance(3, 1, 2, (10, 0, 30))
    for _ in range(6):
        order = _random_order(rng, 3)
        for form in ("mtz", "vajda", "flow"):
            model = build_model(inst, form)
            x = warm_start(model, order)
            assert decode_order(model, x) == order


def test_decode_rejects_fractional_and_broken_walks():
    inst = CellInstance.uniform(2, 1, 2, 0)
    model = build_model(inst, "mtz")
    order = CycleOrder.parse("L2 U1 U2", 2)
    x = warm_start(model, order)

    frac = dict(x)
    frac["x_L1_L2"] = 0.5
    with pytest.raises(DecodeError):
        decode_order(model, frac)

    # a two-cycle instead of one tour: L1->L2->L1, U1->U2->U1
    cycle2 = {k: 0.0 for k in x}
    for arc in ("x_L1_L2", "x_L2_L1", "x_U1_U2", "x_U2_U1"):
        cycle2[arc] = 1.0
    with pytest.raises(DecodeError):
        decode_order(model, cycle2)

    nosucc = dict(x)
    for k in x:
        if k.startswith("x_L2_"):
            nosucc[k] = 0.0
    with pytest.raises(DecodeError):
        decode_order(model, nosucc)


def test_decode_solution_re_evaluates():
    inst = CellInstance.uniform(3, 1, 2, 50)
    model = build_model(inst, "flow", cuts=True)
    res = solve_exact(inst)
    sol = solve_milp(model, incumbent=warm_start(model, res.order))
    order, sched = decode_solution(model, sol)
    assert sched.cycle_time == pytest.approx(float(res.cycle_time), abs=1e-6)
    assert evaluate_cycle(inst, order).cycle_time == res.cycle_time


# -- integer agreement -------------------------------------------------------

def test_every_formulation_finds_the_exact_optimum():
    rng = random.Random(306)
    for _ in range(6):
        inst = CellInstance(2, rng.randint(1, 2), rng.randint(1, 3),
                            tuple(rng.randint(0, 40) for _ in range(2)))
        c_star = float(solve_exact(inst).cycle_time)
        for form in ("mtz", "vajda", "flow"):
            model = build_model(inst, form, cuts=True)
            sol = solve_milp(model, incumbent=warm_start(model, canonical_order(2)))
            assert sol.status == "optimal"
            assert sol.objective == pytest.approx(c_star, abs=1e-6)


def test_variants_agree_on_the_optimum():
    inst = CellInstance.uniform(3, 1, 2, 75)
    c_star = float(solve_exact(inst).cycle_time)
    incumbent_order = solve_exact(inst).order
    for form in ("mtz", "vajda"):
        for variant in ("base", "waits"):
            model = build_model(inst, form, variant=variant, cuts=True)
            sol = solve_milp(model, incumbent=warm_start(model, incumbent_order))
            assert sol.status == "optimal"
            assert sol.objective == pytest.approx(c_star, abs=1e-6)


def test_non_uniform_big_m_fallback_still_solves():
    inst = CellInstance(2, 2, 1, (9, 31))
    c_star = float(solve_exact(inst).cycle_time)
    for form in ("mtz", "flow"):
        model = build_model(inst, form, cuts=True)
        assert model.metadata["big_m"] >= c_star
        sol = solve_milp(model, incumbent=warm_start(model, canonical_order(2)))
        assert sol.objective == pytest.approx(c_star, abs=1e-6)


# -- LP file round trip ------------------------------------------------------

def test_lp_write_read_round_trip():
    inst = CellInstance.uniform(2, 1, 2, 10)
    for form in ("mtz", "vajda", "flow"):
        model = build_model(inst, form)
        buf = io.StringIO()
        write_lp(model, buf)
        again = read_lp(io.StringIO(buf.getvalue()))
        assert len(again.variables) == len(model.variables)
        assert len(again.constraints) == len(model.constraints)
        a = solve_lp_relaxation(model)
        b = solve_lp_relaxation(again)
        assert a.objective == pytest.approx(b.objective, abs=1e-9)


def test_lp_file_round_trips_through_disk(tmp_path):
    inst = CellInstance.uniform(2, 1, 2, 0)
    model = build_model(inst, "mtz", cuts=True)
    path = tmp_path / "model.lp"
    write_lp(model, str(path))
    again = read_lp(str(path))
    a = solve_lp_relaxation(model).objective
    b = solve_lp_relaxation(again).objective
    assert a == pytest.approx(b, abs=1e-9)


# -- reference table ---------------------------------------------------------

def test_reference_table_shape_and_checksum():
    table = expected_table()
    assert len(table) == 33
    assert set(m for m, _ in table) == {4, 5, 6}
    # mutation of the copy must not leak back
    table.pop((4, 0))
    assert expected_cell(4, 0) is not None
    assert len(table_checksum()) == 64


def test_reference_table_known_cells():
    cell = expected_cell(4, 0)
    assert (cell.c_opt, cell.big_m) == (96, 108)
    assert expected_cell(6, 175).c_opt == 207
    assert expected_cell(7, 0) is None


def test_reference_table_flags_the_suspect_cell():
    assert "suspect" in expected_cell(5, 250).note
    assert expected_cell(5, 225).note == ""
