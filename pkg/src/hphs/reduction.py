"""Reduction from half-plane hitting to coverage of points on a circle.

Each deduplicated half-plane contributes one conceptual point on a unit
circle, placed in the direction of its inward normal and ordered
counterclockwise starting from direction (1, 0).  A point of the instance
then "covers" a set of circle points, and because sidedness against a fixed
point is monotone in the normal angle, that set always splits into maximal
cyclic runs: arcs.  Solving the weighted circular arc-cover problem anchored
at the least-covered circle point is equivalent to the original hitting-set
problem; this module builds those circular instances.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .geometry import HalfPlane, WeightedPoint, compare_normals


@dataclass(frozen=True)
class CirclePoints:
    """Half-plane ids arranged counterclockwise by inward normal."""

    order: tuple[int, ...]
    pos_of: dict[int, int]
    halfplanes: tuple[HalfPlane, ...]  # aligned with order

    def __len__(self) -> int:
        return len(self.order)


def build_circle_points(halfplanes: Sequence[HalfPlane]) -> CirclePoints:
    """Sort half-planes by normal angle; requires pairwise distinct normals."""
    ordered = sorted(halfplanes, key=functools.cmp_to_key(compare_normals))
    for prev, cur in zip(ordered, ordered[1:]):
        if compare_normals(prev, cur) == 0:
            raise ValueError(
                f"half-planes {prev.id} and {cur.id} share a normal direction; "
                "dedup them first"
            )
    order = tuple(h.id for h in ordered)
    return CirclePoints(
        order=order,
        pos_of={hid: i for i, hid in enumerate(order)},
        halfplanes=tuple(ordered),
    )


@dataclass(frozen=True)
class HitRow:
    """Hit bits of one point against every circle position."""

    point_id: int
    bits: np.ndarray


class HitTable(Sequence[HitRow]):
    """Dense n-by-m hit matrix plus the exact boundary incidences.

    ``bits[p][i]`` says whether point p lies inside the half-plane at circle
    position i (boundary included).  ``boundary`` lists the (point id, circle
    position) pairs where the point sits exactly on the defining line; those
    pairs are what the fast engine needs to stay exact on degenerate input.
    """

    def __init__(self, bits: np.ndarray, boundary: list[tuple[int, int]]):
        self.bits = bits
        self.boundary = boundary

    def __len__(self) -> int:
        return self.bits.shape[0]

    def __getitem__(self, pid: int) -> HitRow:
        return HitRow(point_id=pid, bits=self.bits[pid])

    def __iter__(self) -> Iterator[HitRow]:
        for pid in range(len(self)):
            yield self[pid]


_CHUNK = 128


def hit_rows(points: Sequence[WeightedPoint], circle: CirclePoints) -> HitTable:
    """Evaluate every point against every circle half-plane.

    Works in int64 chunks; the documented input bounds keep every intermediate
    below 2**63, so the vectorized comparison is exact.
    """
    pts = sorted(points, key=lambda p: p.id)
    if [p.id for p in pts] != list(range(len(pts))):
        raise ValueError("point ids must be dense 0..n-1")
    n, m = len(pts), len(circle)
    px = np.fromiter((p.x for p in pts), dtype=np.int64, count=n)
    py = np.fromiter((p.y for p in pts), dtype=np.int64, count=n)
    ha = np.fromiter((h.a for h in circle.halfplanes), dtype=np.int64, count=m)
    hb = np.fromiter((h.b for h in circle.halfplanes), dtype=np.int64, count=m)
    hc = np.fromiter((h.c for h in circle.halfplanes), dtype=np.int64, count=m)

    bits = np.empty((n, m), dtype=bool)
    boundary: list[tuple[int, int]] = []
    for lo in range(0, n, _CHUNK):
        hi = min(lo + _CHUNK, n)
        vals = px[lo:hi, None] * ha[None, :] + py[lo:hi, None] * hb[None, :]
        vals -= hc[None, :]
        np.greater_equal(vals, 0, out=bits[lo:hi])
        for i, j in np.argwhere(vals == 0):
            boundary.append((lo + int(i), int(j)))
    return HitTable(bits, boundary)


@dataclass(frozen=True)
class Arc:
    """Maximal cyclic run of circle positions hit by one point.

    ``start`` and ``end`` are inclusive circle indices; ``start > end`` means
    the run wraps past position 0.  A run covering every position is stored
    canonically as (0, m-1).
    """

    point_id: int
    start: int
    end: int

    def covers(self, idx: int) -> bool:
        if self.start <= self.end:
            return self.start <= idx <= self.end
        return idx >= self.start or idx <= self.end

    def span(self, m: int) -> int:
        return (self.end - self.start) % m + 1


def arcs_of(row: HitRow) -> list[Arc]:
    """Maximal cyclic runs of set bits, in increasing start order."""
    bits = row.bits.tolist() if isinstance(row.bits, np.ndarray) else list(row.bits)
    m = len(bits)
    if m == 0 or not any(bits):
        return []
    if all(bits):
        return [Arc(row.point_id, 0, m - 1)]
    arcs = []
    for i in range(m):
        if bits[i] and not bits[(i - 1) % m]:
            j = i
            while bits[(j + 1) % m]:
                j += 1
            arcs.append(Arc(row.point_id, i, j % m))
    return arcs


def select_anchor(table: HitTable) -> tuple[int, int]:
    """Circle position covered by the fewest points, with that count.

    Ties go to the smallest position.  The count is exactly the minimum, over
    the half-planes, of how many points hit each one; it bounds the number of
    candidate arcs the solver must try.
    """
    if table.bits.shape[1] == 0:
        raise ValueError("no circle points to anchor on")
    coverage = table.bits.sum(axis=0)
    idx = int(np.argmin(coverage))
    return idx, int(coverage[idx])


def candidate_arcs(table: HitTable, anchor: int) -> list[Arc]:
    """For each point hitting the anchor position, its arc through the anchor."""
    m = table.bits.shape[1]
    out = []
    for pid in np.flatnonzero(table.bits[:, anchor]):
        row = table.bits[int(pid)]
        if row.all():
            out.append(Arc(int(pid), 0, m - 1))
            continue
        bits = row.tolist()
        i = anchor
        while bits[(i - 1) % m]:
            i -= 1
        j = anchor
        while bits[(j + 1) % m]:
            j += 1
        out.append(Arc(int(pid), i % m, j % m))
    return out


@dataclass(frozen=True)
class CandidateInstance:
    """Sequential coverage problem left after committing to one arc.

    ``hseq`` holds the half-plane ids of the circle positions the arc does
    not cover, walking counterclockwise from just past the arc's end back to
    just before its start.  ``point_ids`` is every point except the arc's
    defining point.  Covering hseq in order with those points, at minimum
    total weight, completes the committed arc to an optimal solution.
    """

    point_id: int
    arc: Arc
    hseq: tuple[int, ...]
    point_ids: tuple[int, ...]


def build_instance(
    circle: CirclePoints, arc: Arc, points: Sequence[WeightedPoint]
) -> CandidateInstance:
    m = len(circle)
    if arc.span(m) == m:
        hseq: tuple[int, ...] = ()
    else:
        first = (arc.end + 1) % m
        count = m - arc.span(m)
        hseq = tuple(circle.order[(first + k) % m] for k in range(count))
    pids = tuple(p.id for p in sorted(points, key=lambda p: p.id) if p.id != arc.point_id)
    return CandidateInstance(point_id=arc.point_id, arc=arc, hseq=hseq, point_ids=pids)
