"""Hierarchical cutting of a set of integer lines into triangle cells.

The structure is a tree of triangles. Level 0 is one working triangle
chosen large enough to strictly contain every input point and every
pairwise intersection of the input lines. Each refinement cuts its
cell's conflict count by at least a factor of rho, floored at the leaf
budget n/rho^k with k = ceil(log_rho(r)), which keeps every level-i
conflict list within n/rho^i. A cell stops refining as soon as its
conflict list meets the leaf budget, so leaves sit at mixed depths up
to k and no refinement is spent on a cell already ahead of the
schedule.

Refinement of one cell draws a small random sample of its conflict
lines, clips the sample's arrangement to the cell, fan-triangulates
each face from its lexicographically smallest vertex, and verifies
every sub-triangle against the per-child crossing budget. Failed
attempts resample; the sample size escalates on repeated failures and
backs off when a sample produced more children than the cap allows.

All vertices are exact rationals kept as gcd-reduced homogeneous
integer triples (xn, yn, d) with d > 0. Sign computations run through a
float prefilter with a certified error bound and fall back to exact
integer arithmetic when the float result is too close to zero to trust,
so every stored classification is exact.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

import numpy as np

from .geometry import HalfPlane

# Scale of the working triangle. Input lines satisfy |a|,|b| <= 2^30 and
# |c| <= 2^62, so pairwise intersections have |x|,|y| <= 2^93 and are
# strictly inside a triangle at this scale.
WORK_SPAN = 1 << 96

DEFAULT_RHO = 2
DEFAULT_C_MAX = 64
# Headroom bound on total cells across all levels as a multiple of r^2.
# Measured over random and clustered line sets: 21-27 at n in {64, 256,
# 1024}, rising to ~33 at n = 16000; 40 leaves seed headroom.
C_CELLS = 40
_MAX_ATTEMPTS = 600
_ESCALATE_EVERY = 4
_SAMPLE_CAP = 12
# statistical pre-census gate: subsample size and rejection slack
_GATE_SIZE = 192
_GATE_SLACK = 1.15
# float results closer to zero than this fraction of the term magnitude
# are recomputed exactly
_FLOAT_GUARD = 2.0**-44

HomogPoint = tuple[int, int, int]
Line = tuple[int, int, int]  # (a, b, c) for the line a*x + b*y = c


class CuttingError(RuntimeError):
    """Refinement could not be certified within the retry budget."""


class Classification(Enum):
    FULLY_INSIDE = "inside"
    FULLY_OUTSIDE = "outside"
    CROSSED = "crossed"


def reduce_homog(xn: int, yn: int, d: int) -> HomogPoint:
    if d < 0:
        xn, yn, d = -xn, -yn, -d
    g = math.gcd(math.gcd(abs(xn), abs(yn)), d)
    if g > 1:
        return (xn // g, yn // g, d // g)
    return (xn, yn, d)


def intersect_lines(l1: Line, l2: Line) -> HomogPoint | None:
    """Intersection point of two lines, or None when parallel."""
    a1, b1, c1 = l1
    a2, b2, c2 = l2
    d = a1 * b2 - a2 * b1
    if d == 0:
        return None
    return reduce_homog(c1 * b2 - c2 * b1, a1 * c2 - a2 * c1, d)


def line_sign_at(line: Line, v: HomogPoint) -> int:
    """Sign of a*x + b*y - c at a homogeneous point (d > 0 assumed)."""
    a, b, c = line
    s = a * v[0] + b * v[1] - c * v[2]
    return (s > 0) - (s < 0)


def orient(p: HomogPoint, q: HomogPoint, r: HomogPoint) -> int:
    """Orientation of the triple: positive when counterclockwise.

    For homogeneous points with positive denominators this is the sign
    of the 3x3 determinant of the rows.
    """
    det = (
        p[0] * (q[1] * r[2] - r[1] * q[2])
        - p[1] * (q[0] * r[2] - r[0] * q[2])
        + p[2] * (q[0] * r[1] - r[0] * q[1])
    )
    return (det > 0) - (det < 0)


def _lex_less(u: HomogPoint, v: HomogPoint) -> bool:
    # x then y, compared as exact rationals via cross multiplication
    # (denominators are positive)
    lhs = u[0] * v[2]
    rhs = v[0] * u[2]
    if lhs != rhs:
        return lhs < rhs
    return u[1] * v[2] < v[1] * u[2]


def cell_area2(verts: Sequence[HomogPoint]) -> Fraction:
    """Twice the signed area, exact."""
    acc = Fraction(0)
    for i in range(len(verts)):
        x1, y1, d1 = verts[i]
        x2, y2, d2 = verts[(i + 1) % len(verts)]
        acc += Fraction(x1 * y2 - x2 * y1, d1 * d2)
    return acc


# --- polygon clipping with edge carriers ---------------------------------
#
# A polygon under construction is a list of (vertex, carrier) pairs where
# carrier is the line holding the edge from this vertex to the next. The
# carrier bookkeeping lets each new vertex be computed as the exact
# intersection of two already-known lines.


def _clean_chain(chain: list[tuple[HomogPoint, Line]]) -> list[tuple[HomogPoint, Line]] | None:
    # drop consecutive duplicate vertices, keeping the later carrier,
    # then drop collinear middle vertices; None when nothing 2-dimensional
    # survives
    out: list[tuple[HomogPoint, Line]] = []
    for v, carrier in chain:
        if out and out[-1][0] == v:
            out[-1] = (v, carrier)
        else:
            out.append((v, carrier))
    if len(out) > 1 and out[0][0] == out[-1][0]:
        out.pop()
    changed = True
    while changed and len(out) >= 3:
        changed = False
        for j in range(len(out)):
            a = out[j - 1][0]
            b = out[j][0]
            c = out[(j + 1) % len(out)][0]
            if orient(a, b, c) == 0:
                out.pop(j)
                changed = True
                break
    if len(out) < 3:
        return None
    return out


def _split_polygon(
    poly: list[tuple[HomogPoint, Line]], line: Line, signs: list[int]
) -> tuple[list | None, list | None]:
    """Split a CCW convex polygon by a line into (negative, positive) sides.

    signs[i] is the precomputed sign of the line at vertex i. A side that
    degenerates below two dimensions comes back as None.
    """
    if all(s >= 0 for s in signs):
        return None, poly
    if all(s <= 0 for s in signs):
        return poly, None
    pos: list[tuple[HomogPoint, Line]] = []
    neg: list[tuple[HomogPoint, Line]] = []
    m = len(poly)
    any_zero = False
    for i in range(m):
        v, carrier = poly[i]
        si = signs[i]
        sj = signs[(i + 1) % m]
        if si == 0:
            any_zero = True
        if si >= 0:
            if si == 0 and sj < 0:
                pos.append((v, line))
            else:
                pos.append((v, carrier))
            if si > 0 and sj < 0:
                x = intersect_lines(carrier, line)
                pos.append((x, line))
                neg.append((x, carrier))
        if si <= 0:
            if si == 0 and sj > 0:
                neg.append((v, line))
            else:
                neg.append((v, carrier))
            if si < 0 and sj > 0:
                x = intersect_lines(carrier, line)
                neg.append((x, line))
                pos.append((x, carrier))
    if not any_zero:
        # new vertices sit strictly inside former edges, so both chains
        # are already duplicate-free and strictly convex
        return (neg if len(neg) >= 3 else None), (pos if len(pos) >= 3 else None)
    return _clean_chain(neg), _clean_chain(pos)


@dataclass
class _Refinement:
    """Locate metadata for a refined cell."""

    sampled: list[Line]
    # per face: (pattern over sampled lines, child cell ids in fan order)
    faces: list[tuple[tuple[int, ...], list[int]]]


@dataclass(slots=True)
class Cell:
    id: int
    level: int
    parent: int
    verts: tuple[HomogPoint, HomogPoint, HomogPoint]
    children: list[int] = field(default_factory=list)
    conflict: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    # for refined cells: children as an array plus the exact classification
    # of every conflict line against every child (+1 inside, -1 outside,
    # 0 crossed), row order matching the conflict array
    children_arr: np.ndarray | None = None
    class_mat: np.ndarray | None = None


def classify(cell: Cell, h: HalfPlane) -> Classification:
    """Position of a cell's closed region against a closed half-plane.

    Crossed means the bounding line meets the region's interior, which
    for a triangle is exactly a strict sign change over the vertices.
    """
    line = (h.a, h.b, h.c)
    signs = [line_sign_at(line, v) for v in cell.verts]
    lo = min(signs)
    hi = max(signs)
    if lo < 0 < hi:
        return Classification.CROSSED
    if lo >= 0:
        return Classification.FULLY_INSIDE
    return Classification.FULLY_OUTSIDE


def _working_triangle() -> list[tuple[HomogPoint, Line]]:
    t = WORK_SPAN
    bottom: Line = (0, 1, -t)  # y = -t, interior above
    left: Line = (1, 0, -t)  # x = -t, interior right
    hypo: Line = (-1, -1, -2 * t)  # x + y = 2t, interior below
    v0: HomogPoint = (-t, -t, 1)
    v1: HomogPoint = (3 * t, -t, 1)
    v2: HomogPoint = (-t, 3 * t, 1)
    return [(v0, bottom), (v1, hypo), (v2, left)]


def _sample_size(c1: int, rho: int) -> int:
    return max(1, round(c1 * rho * math.log(rho + 1)))


def _wall_for_cap(c_max: int) -> int:
    """Largest sample size whose typical fan count fits under c_max.

    s lines cut a triangle into at most 1 + s + s(s-1)/2 faces, and fan
    triangulation roughly doubles that, so probe the closed form.
    """
    s = 1
    while 2 * (1 + (s + 1) + (s + 1) * s // 2) <= c_max:
        s += 1
    return s


class HierarchicalCutting:
    """Frozen result of a build: the cell tree plus per-line cell lists.

    For each line index j:
      crossed_internal[j]: non-leaf cells whose interior the line crosses,
        in ascending id order (parents precede children);
      crossed_leaves[j]: leaf cells crossed the same way;
      inside_children[j] / outside_children[j]: children of crossed cells
        classified entirely on the closed inside / outside of half-plane j.
    """

    def __init__(
        self,
        lines: list[Line],
        halfplanes: Sequence[HalfPlane],
        rho: int,
        r: int,
        k: int,
        cells: list[Cell],
        refinements: dict[int, _Refinement],
        crossed_internal: list[np.ndarray],
        crossed_leaves: list[np.ndarray],
        seed: int,
        verts_f: np.ndarray,
    ):
        self.lines = lines
        self.halfplanes = list(halfplanes)
        self.rho = rho
        self.r = r
        self.k = k
        self.cells = cells
        self.refinements = refinements
        self.crossed_internal = crossed_internal
        self.crossed_leaves = crossed_leaves
        self.seed = seed
        # (len(cells), 3, 2) float copies of the exact vertices, for the
        # prefilter side of point location
        self.verts_f = verts_f
        self.parent = np.array([c.parent for c in cells], dtype=np.int64)
        self.level = np.array([c.level for c in cells], dtype=np.int64)
        self.leaf_ids = [c.id for c in cells if not c.children]

    def __len__(self) -> int:
        return len(self.cells)

    def is_leaf(self, cid: int) -> bool:
        return not self.cells[cid].children

    _EMPTY = np.empty(0, dtype=np.int64)

    def children_of(self, cid: int, j: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Children of a cell crossed by line j, split by classification.

        Returns (inside, outside, crossed) child id arrays for half-plane
        j. Only valid when j is in the cell's conflict list.
        """
        cell = self.cells[cid]
        row = int(np.searchsorted(cell.conflict, j))
        cls = cell.class_mat[row]
        kids = cell.children_arr
        return kids[cls > 0], kids[cls < 0], kids[cls == 0]

    def contains(self, cid: int, x: int, y: int) -> bool:
        """Exact closed containment of an integer point in a cell."""
        p = (x, y, 1)
        a, b, c = self.cells[cid].verts
        return orient(a, b, p) >= 0 and orient(b, c, p) >= 0 and orient(c, a, p) >= 0

    def _orient_pt(self, va: HomogPoint, fa, vb: HomogPoint, fb, x: int, y: int) -> int:
        """orient(va, vb, (x, y, 1)) via float prefilter, exact fallback."""
        ax, ay = fa
        bx, by = fb
        d = (bx - ax) * (y - ay) - (by - ay) * (x - ax)
        mag = (abs(bx) + abs(ax)) * (abs(y) + abs(ay)) + (abs(by) + abs(ay)) * (
            abs(x) + abs(ax)
        )
        if abs(d) > mag * _FLOAT_GUARD:
            return 1 if d > 0 else -1
        return orient(va, vb, (x, y, 1))

    def locate(self, x: int, y: int) -> list[int]:
        """Root-to-leaf path of cells containing the point.

        Leaves sit at mixed depths (a cell stops refining as soon as its
        conflict list meets the leaf budget), so the path has length at
        most k. Ties on shared edges go to the smallest child id, which
        keeps every point in exactly one leaf.
        """
        if not self.contains(0, x, y):
            raise ValueError(f"point ({x}, {y}) outside the working region")
        p = (x, y, 1)
        vf = self.verts_f
        path = [0]
        cur = 0
        while self.cells[cur].children:
            ref = self.refinements[cur]
            sig = [line_sign_at(ln, p) for ln in ref.sampled]
            nxt = -1
            for pattern, fan in ref.faces:
                if not all(s == 0 or s == t for s, t in zip(sig, pattern)):
                    continue
                # fan triangles share diagonals: walk the wedge signs once
                first = self.cells[fan[0]].verts
                apex, apex_f = first[0], vf[fan[0], 0]
                prev = self._orient_pt(apex, apex_f, first[1], vf[fan[0], 1], x, y)
                for cid in fan:
                    tri = self.cells[cid].verts
                    cur_g = self._orient_pt(apex, apex_f, tri[2], vf[cid, 2], x, y)
                    if (
                        prev >= 0
                        and cur_g <= 0
                        and self._orient_pt(tri[1], vf[cid, 1], tri[2], vf[cid, 2], x, y)
                        >= 0
                    ):
                        nxt = cid
                        break
                    prev = cur_g
                if nxt >= 0:
                    break
            if nxt < 0:
                raise CuttingError(f"locate failed at cell {cur} for point ({x}, {y})")
            cur = nxt
            path.append(cur)
        return path

    def locate_many(self, points) -> list[int]:
        """Leaf id per point; points is a sequence with .x and .y."""
        return [self.locate(p.x, p.y)[-1] for p in points]


class _Builder:
    def __init__(self, halfplanes, rho, c_max, seed):
        self.halfplanes = halfplanes
        self.lines: list[Line] = [(h.a, h.b, h.c) for h in halfplanes]
        n = len(self.lines)
        self.n = n
        self.rho = rho
        self.c_max = c_max
        self.seed = seed
        self.rng = random.Random(seed)
        self.af = np.array([ln[0] for ln in self.lines], dtype=np.float64)
        self.bf = np.array([ln[1] for ln in self.lines], dtype=np.float64)
        self.cf = np.array([ln[2] for ln in self.lines], dtype=np.float64)
        self.cells: list[Cell] = []
        self.polys: dict[int, list[tuple[HomogPoint, Line]]] = {}
        self.refinements: dict[int, _Refinement] = {}
        self.fcoords: dict[HomogPoint, tuple[float, float]] = {}

    def coords_f(self, v: HomogPoint) -> tuple[float, float]:
        got = self.fcoords.get(v)
        if got is None:
            # int/int division in Python rounds correctly at any size
            got = (v[0] / v[2], v[1] / v[2])
            self.fcoords[v] = got
        return got

    def sign_at(self, li: int, v: HomogPoint) -> int:
        """Sign of line li at vertex v: float prefilter, exact fallback."""
        a, b, c = self.lines[li]
        fx, fy = self.coords_f(v)
        ta = a * fx
        tb = b * fy
        s = ta + tb - c
        if abs(s) > (abs(ta) + abs(tb) + abs(c)) * _FLOAT_GUARD:
            return 1 if s > 0 else -1
        return line_sign_at(self.lines[li], v)

    def census(
        self,
        conflict: np.ndarray,
        lmat: np.ndarray,
        lmat_abs: np.ndarray,
        vmat: np.ndarray,
        vmat_abs: np.ndarray,
        vlist: list[HomogPoint],
        tri_idx: np.ndarray,
    ) -> tuple[np.ndarray, np.ndarray]:
        """Min and max line sign over each triangle's vertices.

        lmat is (L, 3) float coefficients (a, b, -c) for the conflict
        lines, vmat is (3, V) float homogeneous vertex coordinates with
        unit denominators, and tri_idx the (T, 3) vertex indices per
        candidate child. Returns (lo, hi) of shape (L, T). Signs too
        close to zero for float rounding are recomputed exactly.
        """
        s = lmat @ vmat
        guard = (lmat_abs @ vmat_abs) * _FLOAT_GUARD
        signs = ((s > guard).view(np.int8) - (s < -guard).view(np.int8))
        unsure = np.abs(s) <= guard
        if unsure.any():
            for li_pos, vi in zip(*np.nonzero(unsure)):
                signs[li_pos, vi] = line_sign_at(
                    self.lines[int(conflict[li_pos])], vlist[vi]
                )
        tri_signs = signs[:, tri_idx]  # (L, T, 3)
        return tri_signs.min(axis=2), tri_signs.max(axis=2)

    def refine(self, cid: int, level: int, final: bool, child_budget: int) -> list[int]:
        cell = self.cells[cid]
        poly = self.polys[cid]
        conflict = cell.conflict
        lc = len(conflict)
        # the wall is the largest sample size whose child count usually
        # fits under c_max; failed attempts shrink it further. Top levels
        # see the whole concentrated arrangement and need large samples
        # right away; deeper cells usually split fine with tiny ones.
        s_wall = min(lc, _SAMPLE_CAP, _wall_for_cap(self.c_max))
        big = level <= 1 or lc > 512
        start = s_wall if big else min(s_wall, _sample_size(1, self.rho))
        c1 = max(1, math.ceil(start / (self.rho * math.log(self.rho + 1))))
        lmat = np.empty((lc, 3))
        lmat[:, 0] = self.af[conflict]
        lmat[:, 1] = self.bf[conflict]
        lmat[:, 2] = -self.cf[conflict]
        lmat_abs = np.abs(lmat)
        gate = lc > 4 * _GATE_SIZE
        if gate:
            gsub = np.asarray(self.rng.sample(range(lc), _GATE_SIZE))

        for attempt in range(_MAX_ATTEMPTS):
            if attempt and attempt % _ESCALATE_EVERY == 0:
                c1 += 1
            s = min(s_wall, _sample_size(c1, self.rho))
            picks = sorted(self.rng.sample(range(lc), s))
            sampled = [int(conflict[j]) for j in picks]

            faces: list[tuple[list, list[int]]] = [(poly, [])]
            for li in sampled:
                line = self.lines[li]
                nxt = []
                for fp, pat in faces:
                    signs = [self.sign_at(li, v) for v, _ in fp]
                    neg, pos = _split_polygon(fp, line, signs)
                    if neg is not None:
                        nxt.append((neg, pat + [-1]))
                    if pos is not None:
                        nxt.append((pos, pat + [1]))
                faces = nxt
            if not faces:
                continue

            tris: list[tuple[HomogPoint, HomogPoint, HomogPoint]] = []
            tri_face: list[int] = []
            vlist: list[HomogPoint] = []
            idx_rows: list[tuple[int, int, int]] = []
            for fi, (fp, _) in enumerate(faces):
                verts = [v for v, _ in fp]
                apex = 0
                for q in range(1, len(verts)):
                    if _lex_less(verts[q], verts[apex]):
                        apex = q
                base = len(vlist)
                fv = len(verts)
                vlist.extend(verts[apex:])
                vlist.extend(verts[:apex])
                for j in range(1, fv - 1):
                    tris.append((vlist[base], vlist[base + j], vlist[base + j + 1]))
                    idx_rows.append((base, base + j, base + j + 1))
                    tri_face.append(fi)
            if not tris:
                continue
            if len(tris) > self.c_max:
                # larger samples only make more children: back the size off
                s_wall = max(1, s - 1)
                continue
            tri_idx = np.asarray(idx_rows, dtype=np.int64)
            vmat = np.empty((3, len(vlist)))
            for vi, v in enumerate(vlist):
                vmat[0, vi], vmat[1, vi] = self.coords_f(v)
            vmat[2, :] = 1.0
            vmat_abs = np.abs(vmat)

            # the sampled lines bound the faces, so their rows come from
            # the split patterns; the census covers only the rest, whose
            # signs at face vertices are almost never borderline
            keep = np.ones(lc, dtype=bool)
            keep[picks] = False
            sub_conflict = conflict[keep]

            if gate:
                # cheap statistical gate: reject clearly over-budget samples
                # on a subsample before paying for the full exact census
                grows = gsub[keep[gsub]]
                glo, ghi = self.census(
                    conflict[grows], lmat[grows], lmat_abs[grows],
                    vmat, vmat_abs, vlist, tri_idx,
                )
                gcounts = ((glo < 0) & (ghi > 0)).sum(axis=0)
                if (
                    int(gcounts.max()) * (lc - s)
                    > _GATE_SLACK * len(grows) * child_budget
                ):
                    continue

            lo, hi = self.census(
                sub_conflict, lmat[keep], lmat_abs[keep],
                vmat, vmat_abs, vlist, tri_idx,
            )
            crossed = (lo < 0) & (hi > 0)
            counts = crossed.sum(axis=0)
            if int(counts.max()) > child_budget:
                continue

            cls = np.empty((lc, len(tris)), dtype=np.int8)
            cls[keep] = np.where(
                crossed, np.int8(0), np.where(lo >= 0, np.int8(1), np.int8(-1))
            )
            # a face sits strictly on one side of each sampled line, so
            # every triangle of the face classifies by the face's pattern
            patmat = np.asarray([pat for _, pat in faces], dtype=np.int8).T
            cls[~keep] = patmat[:, np.asarray(tri_face, dtype=np.int64)]
            # per-child conflict lists in one pass: nonzero walks the
            # transposed matrix child-major with line positions ascending
            _, row_all = np.nonzero(crossed.T)
            kid_conflicts = np.split(
                sub_conflict[row_all], np.cumsum(counts)[:-1]
            )
            return self._materialize(
                cid, level, faces, tris, tri_face, sampled, kid_conflicts, cls, final
            )
        raise CuttingError(
            f"cell {cid} at level {level} with {lc} conflicts could not be "
            f"refined after {_MAX_ATTEMPTS} attempts"
        )

    def _materialize(
        self, cid, level, faces, tris, tri_face, sampled, kid_conflicts, cls, final
    ) -> list[int]:
        cell = self.cells[cid]
        face_children: list[list[int]] = [[] for _ in faces]
        out_ids: list[int] = []
        face_carriers: list[dict] = []
        if not final:
            for fp, _ in faces:
                fv = [v for v, _ in fp]
                face_carriers.append(
                    {(fv[j], fv[(j + 1) % len(fv)]): fp[j][1] for j in range(len(fv))}
                )
        for ti, tri in enumerate(tris):
            child = Cell(
                id=len(self.cells),
                level=level + 1,
                parent=cid,
                verts=tri,
                conflict=kid_conflicts[ti],
            )
            self.cells.append(child)
            cell.children.append(child.id)
            face_children[tri_face[ti]].append(child.id)
            out_ids.append(child.id)
            if final:
                continue  # leaf regions never split again: no edge carriers
            carriers = face_carriers[tri_face[ti]]
            tri_poly = []
            for j in range(3):
                va, vb = tri[j], tri[(j + 1) % 3]
                carrier = carriers.get((va, vb))
                if carrier is None:
                    # interior fan edge: the line through the two vertices
                    carrier = _line_through(va, vb)
                tri_poly.append((va, carrier))
            self.polys[child.id] = tri_poly
        cell.children_arr = np.asarray(cell.children, dtype=np.int64)
        cell.class_mat = cls
        self.refinements[cid] = _Refinement(
            sampled=[self.lines[li] for li in sampled],
            faces=[
                (tuple(pat), face_children[fi])
                for fi, (_, pat) in enumerate(faces)
            ],
        )
        return out_ids

    def build(self, r: int, k: int) -> HierarchicalCutting:
        n = self.n
        self.k = k
        root_poly = _working_triangle()
        root = Cell(
            id=0,
            level=0,
            parent=-1,
            verts=tuple(v for v, _ in root_poly),
            conflict=np.arange(n, dtype=np.int64),
        )
        self.cells.append(root)
        self.polys[0] = root_poly
        for li in range(n):
            signs = [self.sign_at(li, v) for v in root.verts]
            if not (min(signs) < 0 < max(signs)):
                raise ValueError(
                    f"line {li} does not cross the working region; "
                    "coefficients exceed the documented input bounds"
                )

        # a cell whose conflict list already meets the leaf budget stops
        # refining right away: every budget below it only gets looser, so
        # it is a valid leaf at its own level. Other cells target a
        # conflict reduction of factor rho per refinement (the largest
        # step the small samples reach reliably), floored at the leaf
        # budget, so no refinement is ever spent coasting on a cell that
        # is already ahead of the per-level schedule.
        leaf_budget = n // (self.rho**k)
        frontier = [0]
        for level in range(k):
            next_frontier: list[int] = []
            for cid in frontier:
                cell = self.cells[cid]
                lc = len(cell.conflict)
                if lc <= leaf_budget:
                    continue
                child_budget = max(leaf_budget, lc // self.rho)
                # children of a leaf-budget refinement are all leaves and
                # need no split geometry of their own
                final = child_budget == leaf_budget
                next_frontier.extend(self.refine(cid, level, final, child_budget))
            for cid in frontier:
                self.polys.pop(cid, None)
            frontier = next_frontier

        # cells were appended in ascending-id order, so a stable sort by
        # line id leaves each line's cell list ascending as required
        def per_line(members: list[Cell]) -> list[np.ndarray]:
            if not members:
                return [np.empty(0, dtype=np.int32)] * n
            sizes = np.fromiter(
                (len(c.conflict) for c in members), np.int64, count=len(members)
            )
            ids = np.fromiter((c.id for c in members), np.int32, count=len(members))
            lines = np.concatenate([c.conflict for c in members]).astype(np.int32)
            owners = np.repeat(ids, sizes)
            order = np.argsort(lines, kind="stable")
            lines = lines[order]
            owners = owners[order]
            ids_all = np.arange(n, dtype=np.int32)
            starts = np.searchsorted(lines, ids_all)
            ends = np.searchsorted(lines, ids_all, side="right")
            return [owners[starts[i] : ends[i]] for i in range(n)]

        # every vertex already went through coords_f during refinement, so
        # this is pure cache lookup
        it = (
            coord
            for c in self.cells
            for v in c.verts
            for coord in self.coords_f(v)
        )
        verts_f = np.fromiter(it, np.float64, count=6 * len(self.cells)).reshape(
            -1, 3, 2
        )

        return HierarchicalCutting(
            lines=self.lines,
            halfplanes=self.halfplanes,
            rho=self.rho,
            r=r,
            k=k,
            cells=self.cells,
            refinements=self.refinements,
            crossed_internal=per_line(
                [c for c in self.cells if c.children and len(c.conflict)]
            ),
            crossed_leaves=per_line(
                [c for c in self.cells if not c.children and len(c.conflict)]
            ),
            seed=self.seed,
            verts_f=verts_f,
        )


def build_cutting(
    halfplanes: Sequence[HalfPlane],
    r: int | None = None,
    rho: int = DEFAULT_RHO,
    seed: int = 0,
    c_max: int = DEFAULT_C_MAX,
) -> HierarchicalCutting:
    """Build the hierarchy over the bounding lines of the half-planes.

    r defaults to ceil(sqrt(n)). The construction is randomized but the
    returned structure is verified: every refinement is re-checked
    against the per-child crossing budget before being accepted, so a
    successful build is deterministically valid. Raises CuttingError if
    some cell cannot be refined within the retry budget.
    """
    n = len(halfplanes)
    if n == 0:
        raise ValueError("cannot build a cutting over zero lines")
    if rho < 2:
        raise ValueError("rho must be at least 2")
    if r is None:
        r = math.isqrt(n - 1) + 1
    if not 1 <= r <= n:
        raise ValueError(f"r must be in [1, {n}], got {r}")
    # smallest k with rho^k >= r, computed in integers
    k = 0
    cap = 1
    while cap < r:
        cap *= rho
        k += 1
    return _Builder(halfplanes, rho, c_max, seed).build(r, k)


def _line_through(p: HomogPoint, q: HomogPoint) -> Line:
    """Line through two homogeneous points as integer (a, b, c)."""
    # cross product of the triples gives (a, b, -c) up to scale
    a = p[1] * q[2] - q[1] * p[2]
    b = q[0] * p[2] - p[0] * q[2]
    c = -(p[0] * q[1] - q[0] * p[1])
    g = math.gcd(math.gcd(abs(a), abs(b)), abs(c))
    if g > 1:
        a, b, c = a // g, b // g, c // g
    return (a, b, c)
