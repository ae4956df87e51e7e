"""Exact predicates, dedup, hull, and feasibility against brute oracles."""

from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hphs.geometry import (
    COORD_LIMIT,
    ConvexHull,
    HalfPlane,
    Sidedness,
    WeightedPoint,
    compare_normals,
    convex_hull,
    dedup_halfplanes,
    extreme_point,
    feasibility_check,
    side_of,
)


def P(pid, x, y, w=1):
    return WeightedPoint(pid, x, y, w)


def H(hid, a, b, c):
    return HalfPlane(hid, a, b, c)


# --- side_of ---------------------------------------------------------------


def test_side_of_basic():
    h = H(0, 1, 0, 1)  # x >= 1
    assert side_of(h, P(0, 2, 0)) is Sidedness.INSIDE
    assert side_of(h, P(1, 1, -5)) is Sidedness.BOUNDARY
    assert side_of(h, P(2, 0, 0)) is Sidedness.OUTSIDE


def test_side_of_extreme_magnitudes():
    h = H(0, 2**30, -(2**30), 2**62)
    p = P(0, 2**30, -(2**30))
    # 2^60 + 2^60 - 2^62 = -2^61
    assert side_of(h, p) is Sidedness.OUTSIDE
    assert side_of(H(1, 2**30, -(2**30), 2**61), p) is Sidedness.BOUNDARY


def test_validation_rejects_out_of_range():
    with pytest.raises(ValueError):
        P(0, COORD_LIMIT + 1, 0)
    with pytest.raises(ValueError):
        WeightedPoint(0, 0, 0, 0)
    with pytest.raises(ValueError):
        H(0, 0, 0, 1)
    with pytest.raises(ValueError):
        H(0, 1, 0, 2**62 + 1)


# --- compare_normals --------------------------------------------------------


def test_compare_normals_quadrants():
    # counterclockwise from (1, 0): east, north, west, south
    hs = [H(0, 1, 0, 0), H(1, 0, 1, 0), H(2, -1, 0, 0), H(3, 0, -1, 0)]
    for i in range(4):
        for j in range(4):
            expect = (i > j) - (i < j)
            assert compare_normals(hs[i], hs[j]) == expect


def test_compare_normals_spec_case():
    # 270 degrees comes after 180 degrees
    assert compare_normals(H(0, 0, -1, 0), H(1, -1, 0, 0)) == 1


def test_compare_normals_parallel_same_direction():
    assert compare_normals(H(0, 2, 4, 1), H(1, 1, 2, -7)) == 0


normals = st.tuples(
    st.integers(-(2**30), 2**30), st.integers(-(2**30), 2**30)
).filter(lambda v: v != (0, 0))


@given(normals, normals, normals)
def test_compare_normals_total_order(u, v, w):
    hu, hv, hw = H(0, *u, 0), H(1, *v, 0), H(2, *w, 0)
    cuv = compare_normals(hu, hv)
    assert cuv == -compare_normals(hv, hu)
    # transitivity of strict precedence
    if cuv < 0 and compare_normals(hv, hw) < 0:
        assert compare_normals(hu, hw) < 0
    # equality means positive multiples
    if cuv == 0:
        assert u[0] * v[1] == u[1] * v[0]
        assert u[0] * v[0] >= 0 and u[1] * v[1] >= 0


@given(normals, st.integers(1, 1000))
def test_compare_normals_scaling_invariant(u, k):
    a, b = u
    if abs(a * k) > 2**30 or abs(b * k) > 2**30:
        return
    assert compare_normals(H(0, a, b, 0), H(1, a * k, b * k, 0)) == 0


# --- dedup ------------------------------------------------------------------


def test_dedup_keeps_most_restrictive():
    kept, dropped = dedup_halfplanes([H(0, 1, 0, 0), H(1, 1, 0, 1)])
    assert [h.id for h in kept] == [1]
    assert [h.id for h in dropped] == [0]


def test_dedup_scaled_coefficients():
    # 2x >= 4 is x >= 2, tighter than x >= 1
    kept, dropped = dedup_halfplanes([H(0, 1, 0, 1), H(1, 2, 0, 4)])
    assert [h.id for h in kept] == [1]


def test_dedup_identical_region_keeps_smallest_id():
    kept, _ = dedup_halfplanes([H(3, 2, 0, 2), H(1, 1, 0, 1), H(2, 4, 0, 4)])
    assert [h.id for h in kept] == [1]


def test_dedup_opposite_normals_are_distinct():
    kept, dropped = dedup_halfplanes([H(0, 1, 0, 0), H(1, -1, 0, 0)])
    assert len(kept) == 2 and not dropped


def test_dedup_preserves_input_order():
    hs = [H(0, 0, 1, 5), H(1, 1, 0, 0), H(2, 0, 2, 4), H(3, -1, -1, 0)]
    kept, dropped = dedup_halfplanes(hs)
    assert [h.id for h in kept] == [0, 1, 3]
    assert [h.id for h in dropped] == [2]


def _region_subset_bruteforce(inner: HalfPlane, outer: HalfPlane, pts) -> bool:
    return all(
        side_of(outer, p) is not Sidedness.OUTSIDE
        for p in pts
        if side_of(inner, p) is not Sidedness.OUTSIDE
    )


def test_dedup_dropped_regions_contain_kept_fuzz():
    rng = random.Random(42)
    probe = [P(i, rng.randint(-50, 50), rng.randint(-50, 50)) for i in range(400)]
    for trial in range(50):
        hs = []
        for i in range(rng.randint(2, 10)):
            a, b = 0, 0
            while (a, b) == (0, 0):
                a, b = rng.randint(-4, 4), rng.randint(-4, 4)
            hs.append(H(i, a, b, rng.randint(-20, 20)))
        kept, dropped = dedup_halfplanes(hs)
        assert len(kept) + len(dropped) == len(hs)
        kept_by_prim = {}
        for h in kept:
            from math import gcd

            g = gcd(abs(h.a), abs(h.b))
            kept_by_prim[(h.a // g, h.b // g)] = h
        for d in dropped:
            from math import gcd

            g = gcd(abs(d.a), abs(d.b))
            k = kept_by_prim[(d.a // g, d.b // g)]
            # kept half-plane is a subset: hitting it hits the dropped one
            assert _region_subset_bruteforce(k, d, probe)


# --- convex hull ------------------------------------------------------------


def _inside_hull(hull: ConvexHull, x: int, y: int) -> bool:
    vs = hull.vertices
    if len(vs) == 1:
        return (x, y) == vs[0]
    if len(vs) == 2:
        (x1, y1), (x2, y2) = vs
        if (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1) != 0:
            return False
        return min(x1, x2) <= x <= max(x1, x2) and min(y1, y2) <= y <= max(y1, y2)
    for i in range(len(vs)):
        ox, oy = vs[i]
        px, py = vs[(i + 1) % len(vs)]
        if (px - ox) * (y - oy) - (py - oy) * (x - ox) < 0:
            return False
    return True


def test_hull_square_with_interior_points():
    pts = [P(0, 0, 0), P(1, 4, 0), P(2, 4, 4), P(3, 0, 4), P(4, 2, 2), P(5, 2, 0)]
    hull = convex_hull(pts)
    assert set(hull.vertices) == {(0, 0), (4, 0), (4, 4), (0, 4)}
    assert len(hull.vertices) == 4  # collinear (2, 0) dropped


def test_hull_degenerate_shapes():
    assert convex_hull([P(0, 3, 3)]).vertices == ((3, 3),)
    seg = convex_hull([P(0, 0, 0), P(1, 2, 2), P(2, 1, 1)])
    assert set(seg.vertices) == {(0, 0), (2, 2)}
    dup = convex_hull([P(0, 1, 1), P(1, 1, 1)])
    assert dup.vertices == ((1, 1),)


def test_hull_fuzz_contains_all_points_and_extremes_match():
    rng = random.Random(7)
    for trial in range(60):
        n = rng.randint(1, 40)
        r = rng.choice([1, 3, 10, 1000])
        pts = [P(i, rng.randint(-r, r), rng.randint(-r, r)) for i in range(n)]
        hull = convex_hull(pts)
        hull_set = set(hull.vertices)
        assert hull_set <= {(p.x, p.y) for p in pts}
        for p in pts:
            assert _inside_hull(hull, p.x, p.y), (trial, p)
        for _ in range(25):
            a, b = 0, 0
            while (a, b) == (0, 0):
                a, b = rng.randint(-9, 9), rng.randint(-9, 9)
            vx, vy = extreme_point(hull, a, b)
            want = max(a * p.x + b * p.y for p in pts)
            assert a * vx + b * vy == want, (trial, a, b)


# --- feasibility ------------------------------------------------------------


def test_feasibility_reports_unhit():
    hull = convex_hull([P(0, 0, 0)])
    assert feasibility_check(hull, [H(0, 1, 0, 1)]) == [0]
    assert feasibility_check(hull, [H(0, 1, 0, 0)]) == []


def test_feasibility_fuzz_vs_quadratic_scan():
    rng = random.Random(11)
    for trial in range(60):
        n = rng.randint(1, 30)
        pts = [P(i, rng.randint(-30, 30), rng.randint(-30, 30)) for i in range(n)]
        hs = []
        for i in range(rng.randint(1, 25)):
            a, b = 0, 0
            while (a, b) == (0, 0):
                a, b = rng.randint(-8, 8), rng.randint(-8, 8)
            hs.append(H(i, a, b, rng.randint(-100, 300)))
        hull = convex_hull(pts)
        got = feasibility_check(hull, hs)
        want = [
            h.id
            for h in hs
            if all(side_of(h, p) is Sidedness.OUTSIDE for p in pts)
        ]
        assert got == want, trial
