"""Baseline engine traces, backtracking, and the oracle inequality chain."""

from __future__ import annotations

import random
from math import inf

from conftest import rand_feasible

from hphs.dp_reference import backtrack, run
from hphs.geometry import HalfPlane, WeightedPoint, dedup_halfplanes, hits
from hphs.oracle import explicit_arcs, interval_cover_deltas, interval_cover_dp
from hphs.reduction import (
    Arc,
    CandidateInstance,
    build_circle_points,
    build_instance,
    candidate_arcs,
    hit_rows,
    select_anchor,
)


def P(pid, x, y, w=1):
    return WeightedPoint(pid, x, y, w)


def H(hid, a, b, c):
    return HalfPlane(hid, a, b, c)


def inst_of(hseq, point_ids, point_id=99):
    return CandidateInstance(
        point_id=point_id,
        arc=Arc(point_id, 0, 0),
        hseq=tuple(hseq),
        point_ids=tuple(point_ids),
    )


def rows_from(table):
    """inside_row callable from an explicit {hid: bits} table."""
    return lambda hid: table[hid]


# --- hand traces ------------------------------------------------------------


def test_trace_shared_point_wins():
    # p0 (w=3) inside both steps, p1 (w=4) inside the second only
    inst = inst_of([0, 1], [0, 1])
    weights = [3, 4]
    table = {0: [True, False], 1: [True, True]}
    sol = run(inst, weights, rows_from(table))
    assert sol.step_mins == (3, 3)
    assert sol.value == 3
    assert sol.points == {0}


def test_trace_disjoint_points_accumulate():
    inst = inst_of([0, 1], [0, 1])
    weights = [3, 4]
    table = {0: [True, False], 1: [False, True]}
    sol = run(inst, weights, rows_from(table))
    assert sol.step_mins == (3, 7)
    assert sol.value == 7
    assert sol.points == {0, 1}


def test_trace_rebased_point_reused_dedups():
    # p0 is the step-3 minimum with a cost rebased at step 2; the chain walks
    # 3 -> 2 -> 1 and picks p0 twice, so the set is cheaper than the value
    inst = inst_of([0, 1, 2], [0, 1, 2])
    weights = [1, 1, 10]
    table = {
        0: [True, False, False],
        1: [False, True, False],
        2: [True, False, True],
    }
    sol = run(inst, weights, rows_from(table))
    assert sol.step_mins == (1, 2, 3)
    assert sol.value == 3
    assert sol.points == {0, 1}
    assert sum(weights[p] for p in sol.points) == 2  # strictly below value


def test_empty_sequence_is_free():
    sol = run(inst_of([], [0, 1]), [5, 6], rows_from({}))
    assert sol.value == 0 and sol.points == frozenset()


def test_uncoverable_step_aborts_infinite():
    inst = inst_of([0, 1], [0, 1])
    table = {0: [True, True], 1: [False, False]}
    sol = run(inst, [2, 3], rows_from(table))
    assert sol.value == inf
    assert sol.points is None
    assert sol.step_mins == (2, inf)


def test_smallest_id_wins_ties():
    inst = inst_of([0], [0, 1, 2])
    table = {0: [True, True, True]}
    sol = run(inst, [5, 5, 5], rows_from(table))
    assert sol.points == {0}


def test_backtrack_chain():
    # steps 1..4; step 4's point was rebased at step 2, step 2's at step 0
    assert backtrack([7, 8, 9, 5], [0, 0, 1, 2]) == {5, 8}
    assert backtrack([3], [0]) == {3}


# --- inequality chain against the explicit oracle ---------------------------


def test_value_between_set_weight_and_explicit_optimum_fuzz():
    rng = random.Random(21)
    checked = 0
    for trial in range(120):
        n = rng.randint(2, 10)
        pts, hs = rand_feasible(rng, n)
        kept, _ = dedup_halfplanes(hs)
        if len(kept) < 2:
            continue
        circle = build_circle_points(kept)
        table = hit_rows(pts, circle)
        anchor, kappa = select_anchor(table)
        weights = [p.w for p in pts]
        for alpha in candidate_arcs(table, anchor):
            inst = build_instance(circle, alpha, pts)
            sol = run(
                inst, weights, lambda hid: table.bits[:, circle.pos_of[hid]]
            )
            iinst = explicit_arcs(inst, table)
            explicit = interval_cover_dp(iinst, weights)
            deltas = interval_cover_deltas(iinst, weights)
            # pointwise dominance of the sweep minima
            for i, d in enumerate(sol.step_mins):
                assert d <= deltas[i], (trial, alpha, i)
            if sol.value == inf:
                assert explicit == inf, (trial, alpha)
                continue
            checked += 1
            assert sol.value <= explicit, (trial, alpha)
            got_w = sum(weights[p] for p in sol.points)
            assert got_w <= sol.value, (trial, alpha)
            # the recovered set plus the committed point covers everything
            chosen = [pts[p] for p in sol.points]
            for hid in inst.hseq:
                h = next(x for x in kept if x.id == hid)
                assert any(hits(h, q) for q in chosen), (trial, alpha, hid)
    assert checked > 50
