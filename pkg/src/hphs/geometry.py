"""Exact integer geometry for points and closed half-planes.

All predicates are computed with Python integers, so there is no rounding
anywhere in the pipeline.  A half-plane ``(a, b, c)`` is the closed region
``a*x + b*y >= c``; its boundary line counts as inside.  Coordinate and
coefficient magnitudes are validated against the documented input bounds so
that downstream vectorized code may safely assume int64 intermediates.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Sequence

COORD_LIMIT = 2**30
OFFSET_LIMIT = 2**62
WEIGHT_LIMIT = 2**31


class Sidedness(enum.Enum):
    INSIDE = 1
    BOUNDARY = 0
    OUTSIDE = -1


@dataclass(frozen=True)
class WeightedPoint:
    """An input point with a positive integer weight."""

    id: int
    x: int
    y: int
    w: int

    def __post_init__(self) -> None:
        if self.id < 0:
            raise ValueError(f"point id must be >= 0, got {self.id}")
        if abs(self.x) > COORD_LIMIT or abs(self.y) > COORD_LIMIT:
            raise ValueError(f"point {self.id}: coordinate exceeds |{COORD_LIMIT}|")
        if not 1 <= self.w <= WEIGHT_LIMIT:
            raise ValueError(f"point {self.id}: weight must be in [1, {WEIGHT_LIMIT}]")


@dataclass(frozen=True)
class HalfPlane:
    """The closed half-plane a*x + b*y >= c with integer coefficients."""

    id: int
    a: int
    b: int
    c: int

    def __post_init__(self) -> None:
        if self.id < 0:
            raise ValueError(f"half-plane id must be >= 0, got {self.id}")
        if self.a == 0 and self.b == 0:
            raise ValueError(f"half-plane {self.id}: normal must be nonzero")
        if abs(self.a) > COORD_LIMIT or abs(self.b) > COORD_LIMIT:
            raise ValueError(f"half-plane {self.id}: normal exceeds |{COORD_LIMIT}|")
        if abs(self.c) > OFFSET_LIMIT:
            raise ValueError(f"half-plane {self.id}: offset exceeds |{OFFSET_LIMIT}|")


def side_of(h: HalfPlane, p: WeightedPoint) -> Sidedness:
    """Classify p against h; the boundary line belongs to the half-plane."""
    v = h.a * p.x + h.b * p.y - h.c
    if v > 0:
        return Sidedness.INSIDE
    if v == 0:
        return Sidedness.BOUNDARY
    return Sidedness.OUTSIDE


def hits(h: HalfPlane, p: WeightedPoint) -> bool:
    return h.a * p.x + h.b * p.y >= h.c


def _angular_half(a: int, b: int) -> int:
    # 0 for directions in [0, 180) degrees, 1 for [180, 360)
    if b > 0 or (b == 0 and a > 0):
        return 0
    return 1


def compare_normals(h1: HalfPlane, h2: HalfPlane) -> int:
    """Order normals counterclockwise starting from direction (1, 0).

    Returns -1 / 0 / +1; 0 exactly when the normals point the same way.
    Implemented with cross products only, no angle computation.
    """
    k1 = _angular_half(h1.a, h1.b)
    k2 = _angular_half(h2.a, h2.b)
    if k1 != k2:
        return -1 if k1 < k2 else 1
    cross = h1.a * h2.b - h2.a * h1.b
    if cross > 0:
        return -1
    if cross < 0:
        return 1
    return 0


def dedup_halfplanes(
    halfplanes: Sequence[HalfPlane],
) -> tuple[list[HalfPlane], list[HalfPlane]]:
    """Collapse half-planes sharing a normal direction to the most restrictive.

    Among half-planes with the same normal direction, the one with the largest
    normalized offset c/|n| defines the common intersection boundary; keeping
    only it preserves the hitting-set optimum because any point inside it is
    inside every dropped duplicate.  Ties on identical regions keep the
    smallest id.  Returns (kept, dropped), both in input order.
    """
    best: dict[tuple[int, int], HalfPlane] = {}
    for h in halfplanes:
        g = gcd(abs(h.a), abs(h.b))
        prim = (h.a // g, h.b // g)
        cur = best.get(prim)
        if cur is None:
            best[prim] = h
            continue
        gc = gcd(abs(cur.a), abs(cur.b))
        # compare h.c / g against cur.c / gc without leaving integers
        lhs = h.c * gc
        rhs = cur.c * g
        if lhs > rhs or (lhs == rhs and h.id < cur.id):
            best[prim] = h
    kept_ids = {h.id for h in best.values()}
    kept = [h for h in halfplanes if h.id in kept_ids]
    dropped = [h for h in halfplanes if h.id not in kept_ids]
    return kept, dropped


def _cross(o: tuple[int, int], p: tuple[int, int], q: tuple[int, int]) -> int:
    return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0])


@dataclass(frozen=True)
class ConvexHull:
    """Strictly convex hull with chains kept for extreme-point searches.

    ``lower`` runs left to right along the bottom, ``upper`` left to right
    along the top; both include the shared leftmost and rightmost vertices.
    ``vertices`` is the counterclockwise cycle without repetition.
    """

    vertices: tuple[tuple[int, int], ...]
    lower: tuple[tuple[int, int], ...] = field(repr=False)
    upper: tuple[tuple[int, int], ...] = field(repr=False)


def convex_hull(points: Iterable[WeightedPoint]) -> ConvexHull:
    """Monotone-chain hull; collinear and duplicate points are dropped."""
    pts = sorted({(p.x, p.y) for p in points})
    if not pts:
        raise ValueError("convex_hull requires at least one point")
    if len(pts) == 1:
        v = (pts[0],)
        return ConvexHull(vertices=v, lower=v, upper=v)

    lower: list[tuple[int, int]] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[int, int]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)

    cycle = lower[:-1] + upper[:-1]
    return ConvexHull(
        vertices=tuple(cycle),
        lower=tuple(lower),
        upper=tuple(reversed(upper)),
    )


def _peak_on_chain(chain: Sequence[tuple[int, int]], a: int, b: int) -> tuple[int, int]:
    """Maximum of a*x + b*y over a chain whose edge values change sign once.

    Binary search for the first edge with nonpositive directional gain; the
    vertex before it is the peak.  Works for the hull chains because edge
    slopes are monotone along each one.
    """
    lo, hi = 0, len(chain) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        vx, vy = chain[mid]
        wx, wy = chain[mid + 1]
        if a * (wx - vx) + b * (wy - vy) > 0:
            lo = mid + 1
        else:
            hi = mid
    return chain[lo]


def extreme_point(hull: ConvexHull, a: int, b: int) -> tuple[int, int]:
    """Hull vertex maximizing a*x + b*y, found in O(log h)."""
    if len(hull.vertices) <= 2:
        return max(hull.vertices, key=lambda v: a * v[0] + b * v[1])
    if b > 0:
        return _peak_on_chain(hull.upper, a, b)
    if b < 0:
        return _peak_on_chain(hull.lower, a, b)
    if a > 0:
        return hull.lower[-1]
    return hull.lower[0]


def feasibility_check(hull: ConvexHull, halfplanes: Sequence[HalfPlane]) -> list[int]:
    """Ids of half-planes containing no input point at all.

    A half-plane misses every point exactly when even the hull vertex extreme
    in its normal direction falls outside it.
    """
    unhit = []
    for h in halfplanes:
        vx, vy = extreme_point(hull, h.a, h.b)
        if h.a * vx + h.b * vy < h.c:
            unhit.append(h.id)
    return unhit
