"""Independent slow solvers used as ground truth in tests.

Three layers, deliberately separate from the production engines:

* ``explicit_arcs`` + ``interval_cover_dp``: materialize the interval
  family a candidate instance induces on the cut-open circle and solve the
  covering problem by a left-to-right sweep over explicit intervals.  The
  sweep minima dominate the indirect engine's step minima pointwise, which
  the test suite asserts.
* ``hitting_set_bruteforce``: exact branch-and-bound over point subsets.
* ``circular_cover_bruteforce``: exact optimum of the circular arc-cover
  problem, computed candidate-by-candidate from the explicit intervals.

The brute-force guards are hard errors, not truncations: silently solving a
larger instance approximately would poison every test built on top.
"""

from __future__ import annotations

from dataclasses import dataclass
from heapq import heappop, heappush
from math import inf
from typing import Sequence

from .geometry import HalfPlane, WeightedPoint, hits
from .reduction import (
    Arc,
    CandidateInstance,
    CirclePoints,
    HitTable,
    arcs_of,
    build_instance,
    candidate_arcs,
    select_anchor,
)

BRUTE_FORCE_POINT_LIMIT = 20
BRUTE_FORCE_CIRCLE_LIMIT = 12


@dataclass(frozen=True)
class Interval:
    """One arc restricted to the cut-open circle: 1-based inclusive ends."""

    left: int
    right: int
    weight: int
    point_id: int
    arc: Arc


@dataclass(frozen=True)
class IntervalInstance:
    positions: int
    intervals: tuple[Interval, ...]


def _contains_cyclic(outer: Arc, inner: Arc, m: int) -> bool:
    # measure both inner endpoints relative to outer.start
    length = (outer.end - outer.start) % m
    s = (inner.start - outer.start) % m
    e = (inner.end - outer.start) % m
    return s <= e <= length


def explicit_arcs(inst: CandidateInstance, table: HitTable) -> IntervalInstance:
    """All arcs that can help complete the committed arc, as line intervals.

    Keeps every arc of every other point unless it fully contains the
    committed arc, then clips it to the uncovered positions.  Containment of
    the committed arc is exactly what makes a clip non-contiguous, so after
    the filter each surviving arc maps to one interval (possibly empty, then
    it is dropped).
    """
    m = table.bits.shape[1]
    alpha = inst.arc
    line_len = len(inst.hseq)
    if line_len == 0:
        return IntervalInstance(positions=0, intervals=())
    first = (alpha.end + 1) % m
    out = []
    for pid in inst.point_ids:
        for beta in arcs_of(table[pid]):
            if beta.span(m) == m or _contains_cyclic(beta, alpha, m):
                continue
            s = (beta.start - first) % m
            e = (beta.end - first) % m
            if s > e:
                # wraps past the cut without containing the committed arc,
                # so the tail lies inside the covered span: keep the head
                s = 0
            elif s > line_len - 1:
                continue
            out.append(
                Interval(
                    left=s + 1,
                    right=min(e, line_len - 1) + 1,
                    weight=0,
                    point_id=pid,
                    arc=beta,
                )
            )
    return IntervalInstance(positions=line_len, intervals=tuple(out))


def _sweep(
    iinst: IntervalInstance, weights: Sequence[int]
) -> tuple[list[int | float], list[int]]:
    """Left-to-right sweep; returns per-position minima and argmin intervals.

    An interval's cost is its weight plus the minimum at the position just
    left of it, fixed when the sweep reaches its left end.  Expired entries
    are popped lazily from the heap.
    """
    m = iinst.positions
    starts: list[list[int]] = [[] for _ in range(m + 1)]
    for k, iv in enumerate(iinst.intervals):
        starts[iv.left].append(k)
    mins: list[int | float] = [0] * (m + 1)
    args = [-1] * (m + 1)
    heap: list[tuple[int | float, int, int]] = []  # (cost, right, interval idx)
    for pos in range(1, m + 1):
        for k in starts[pos]:
            iv = iinst.intervals[k]
            heappush(heap, (weights[iv.point_id] + mins[pos - 1], -iv.right, k))
        while heap and -heap[0][1] < pos:
            heappop(heap)
        if heap:
            mins[pos] = heap[0][0]
            args[pos] = heap[0][2]
        else:
            mins[pos] = inf
            args[pos] = -1
    return mins, args


def interval_cover_dp(iinst: IntervalInstance, weights: Sequence[int]) -> int | float:
    """Minimum weight to cover every position, or math.inf."""
    if iinst.positions == 0:
        return 0
    mins, _ = _sweep(iinst, weights)
    return mins[iinst.positions]


def interval_cover_deltas(
    iinst: IntervalInstance, weights: Sequence[int]
) -> list[int | float]:
    """Per-position sweep minima (positions 1..m), for dominance tests."""
    mins, _ = _sweep(iinst, weights)
    return mins[1:]


def interval_cover_solution(
    iinst: IntervalInstance, weights: Sequence[int]
) -> tuple[int | float, list[Interval]]:
    """Optimal value plus one witness subset of intervals."""
    if iinst.positions == 0:
        return 0, []
    mins, args = _sweep(iinst, weights)
    if mins[iinst.positions] == inf:
        return inf, []
    chosen = []
    pos = iinst.positions
    while pos > 0:
        iv = iinst.intervals[args[pos]]
        chosen.append(iv)
        pos = iv.left - 1
    return mins[iinst.positions], chosen


def hitting_set_bruteforce(
    points: Sequence[WeightedPoint], halfplanes: Sequence[HalfPlane]
) -> tuple[int | float, frozenset[int] | None]:
    """Exact minimum-weight hitting set by branch and bound.

    Branches on the uncovered half-plane with the fewest remaining hitters;
    every solution must use one of them, so the search is complete.
    """
    if len(points) > BRUTE_FORCE_POINT_LIMIT:
        raise ValueError(
            f"brute force limited to {BRUTE_FORCE_POINT_LIMIT} points, "
            f"got {len(points)}"
        )
    pts = sorted(points, key=lambda p: p.id)
    hitters: list[list[WeightedPoint]] = []
    for h in halfplanes:
        hs = [p for p in pts if hits(h, p)]
        if not hs:
            return inf, None
        hitters.append(hs)

    best_w: int | float = inf
    best_set: frozenset[int] | None = None

    def covered(chosen: dict[int, WeightedPoint], j: int) -> bool:
        return any(p.id in chosen for p in hitters[j])

    def search(chosen: dict[int, WeightedPoint], acc: int) -> None:
        nonlocal best_w, best_set
        if acc >= best_w:
            return
        open_js = [j for j in range(len(hitters)) if not covered(chosen, j)]
        if not open_js:
            best_w = acc
            best_set = frozenset(chosen)
            return
        j = min(open_js, key=lambda j: len(hitters[j]))
        for p in hitters[j]:
            chosen[p.id] = p
            search(chosen, acc + p.w)
            del chosen[p.id]

    search({}, 0)
    return best_w, best_set


def circular_cover_bruteforce(
    points: Sequence[WeightedPoint], circle: CirclePoints, table: HitTable
) -> tuple[int | float, list[Arc] | None]:
    """Exact minimum-weight arc cover of the whole circle.

    Every cover must use an arc through the least-covered position, so trying
    each such arc and completing it optimally over the explicit intervals is
    exhaustive.  Returns the value and one witness arc set.
    """
    n, m = table.bits.shape
    if n > BRUTE_FORCE_CIRCLE_LIMIT or m > BRUTE_FORCE_CIRCLE_LIMIT:
        raise ValueError(
            f"circular brute force limited to {BRUTE_FORCE_CIRCLE_LIMIT} "
            f"points and circle positions, got {n} and {m}"
        )
    weights = [p.w for p in sorted(points, key=lambda p: p.id)]
    anchor, coverage = select_anchor(table)
    if coverage == 0:
        return inf, None
    best: int | float = inf
    best_arcs: list[Arc] | None = None
    for alpha in candidate_arcs(table, anchor):
        inst = build_instance(circle, alpha, points)
        iinst = explicit_arcs(inst, table)
        value, chosen = interval_cover_solution(iinst, weights)
        total = weights[alpha.point_id] + value
        if total < best:
            best = total
            best_arcs = [alpha] + [iv.arc for iv in chosen]
    if best_arcs is not None:
        for pos in range(m):
            assert any(a.covers(pos) for a in best_arcs), "cover check failed"
    return best, best_arcs
