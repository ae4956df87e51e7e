"""Cutting-accelerated engine for the sequential coverage recurrence.

Computes the same per-step minima and resets as the baseline scan, but
against a hierarchical cutting of the step lines, so one step costs time
proportional to the cells the line crosses rather than to all points.

State is kept as additive shifts instead of explicit costs.  A point's
cost is its weight plus its own shift plus the shifts of every cell on
its root-to-leaf path:

    cost(p) = w(p) + shift(p) + sum of shift(cell), cell on path(p)

A step reset then never rewrites costs point by point.  Points in
crossed leaf cells that fall strictly outside the step's half-plane get
their own shift rewritten; a child cell that lies entirely outside gets
one subtree-wide shift, after zeroing the live shifts anywhere below it
so the new shift is the only one in effect.

That zeroing (a flush) has two implementations chosen by subtree size.
Small subtrees are swept directly: cells of a subtree are contiguous in
preorder, and the point lists are kept in a preorder-sorted copy, so
the sweep is a handful of slice assignments, and the subtree's cached
minima are restored from their precomputed shift-free values.  Large
subtrees are flushed through a registry: every new live shift files its
id with those ancestors whose subtree is above the sweep threshold, and
the flush drains the cell's registry, skipping entries already zeroed
from elsewhere.

Each cell also caches the minimum, over the points below it, of the
point's weight plus every shift at or below the cell, together with the
point achieving it.  The per-step minimum is then assembled from the
cells the line crosses: fully-inside children contribute their cached
minimum plus the shifts from the child up to the root, crossed leaves
contribute their points individually, and points lying exactly on the
step line are compensated separately since cell classification treats
a touching cell as outside.

All bulk work runs as numpy batches over flat arrays indexed by cell
id; python-level loops survive only where the batches are tiny.  Values
are int64 throughout with a large sentinel for "no point below";
documented input bounds keep every sum far from overflow.
"""

from __future__ import annotations

from math import inf
from typing import Sequence

import numpy as np

from .cutting import HierarchicalCutting
from .dp_reference import IndirectSolution, backtrack
from .geometry import WeightedPoint
from .indexed_heap import IndexedHeap
from .reduction import CandidateInstance

# sentinel minimum for cells with no points below; real costs stay far
# below _BIG even after shift sums, so a threshold compare is exact
_INF = 1 << 62
_BIG = 1 << 60

# leaves holding at least this many points keep an addressable heap;
# smaller ones recompute their minimum by direct scan, which is cheaper
# than heap maintenance at these sizes
_HEAP_MIN = 32

# subtrees up to this many cells are flushed by direct sweep; larger
# ones keep a registry of the live shifts below them
_SWEEP_MAX = 512

# batches this small are cheaper in plain python than as numpy calls
_TINY = 24


class InvariantError(RuntimeError):
    """Internal engine state failed a consistency recheck."""


def _expand(starts: np.ndarray, counts: np.ndarray):
    """Ragged range expansion.

    Returns (idx, segstarts): idx walks [starts[j], starts[j]+counts[j])
    for every j in order; segstarts[j] is where segment j begins in idx.
    Zero-length segments vanish from idx, but then segstarts must not be
    fed to reduceat, so minimum extraction requires positive counts.
    """
    csum = np.cumsum(counts)
    tot = int(csum[-1]) if len(counts) else 0
    if tot == 0:
        e = np.empty(0, dtype=np.int64)
        return e, e
    segstarts = csum - counts
    idx = np.repeat(starts - segstarts, counts)
    idx += np.arange(tot, dtype=np.int64)
    return idx, segstarts


_PID_PAD = np.int64(1 << 40)  # beyond any point id, below any real cost


def _seg_min(vals: np.ndarray, pids: np.ndarray, segstarts: np.ndarray,
             counts: np.ndarray):
    """Per-segment minimum of (val, pid), ties to the smallest pid.

    Segments must be contiguous, in order, and non-empty: vals[segstarts[j]:
    segstarts[j] + counts[j]] is segment j.
    """
    v = np.minimum.reduceat(vals, segstarts)
    tie = np.where(vals == np.repeat(v, counts), pids, _PID_PAD)
    g = np.minimum.reduceat(tie, segstarts)
    return v, g


class FastEngine:
    """One candidate instance bound to a cutting of its step lines.

    The cutting must have been built over the bounding lines of the
    instance's half-plane sequence, in sequence order.  ``boundary``
    lists (point id, half-plane id) pairs where the point lies exactly
    on the half-plane's line; those points get the out-of-band exact
    treatment.  With ``check_invariants`` the engine re-derives its full
    state from scratch after initialization and after every step and
    raises InvariantError on any mismatch (slow; debugging aid).
    """

    def __init__(
        self,
        cut: HierarchicalCutting,
        inst: CandidateInstance,
        points: Sequence[WeightedPoint],
        weights: Sequence[int],
        boundary: Sequence[tuple[int, int]] = (),
        check_invariants: bool = False,
    ):
        if len(cut.lines) != len(inst.hseq):
            raise ValueError(
                f"cutting has {len(cut.lines)} lines but the sequence has "
                f"{len(inst.hseq)} steps"
            )
        for j, hid in enumerate(inst.hseq):
            if cut.halfplanes[j].id != hid:
                raise ValueError(
                    f"cutting line {j} was built from half-plane "
                    f"{cut.halfplanes[j].id}, sequence expects {hid}"
                )
        self.cut = cut
        self.inst = inst
        self.m = len(inst.hseq)
        self.check = check_invariants

        cells = cut.cells
        C = len(cells)
        self.C = C
        self.k = cut.k
        P = len(points)
        self.P = P
        if any(points[i].id != i for i in range(P)):
            raise ValueError("point ids must be dense 0..n-1")

        self.px = np.fromiter((p.x for p in points), dtype=np.int64, count=P)
        self.py = np.fromiter((p.y for p in points), dtype=np.int64, count=P)
        self.w = np.asarray(list(weights), dtype=np.int64)
        if len(self.w) != P:
            raise ValueError("one weight per point required")
        self.members = np.asarray(inst.point_ids, dtype=np.int64)

        self._build_tree_arrays()
        self._build_line_arrays()
        self._locate_points(points)
        self._build_state()
        self._build_exc(boundary)

        self._init_minima()
        # shift-free minima, for restoring swept subtrees wholesale
        self.minw0 = self.minc.copy()
        self.marg0 = self.marg.copy()
        self._stash: dict | None = None
        if self.check:
            self._shadow_cost = [int(x) for x in self.w]
            self._shadow_reset = [0] * P
            self._check_state()

    # --- construction ----------------------------------------------------

    def _build_tree_arrays(self) -> None:
        cut = self.cut
        C = self.C
        cells = cut.cells
        self.par = cut.parent.astype(np.int64)
        self.level = cut.level.astype(np.int64)
        parc = np.where(self.par < 0, 0, self.par)
        D = self.k + 1
        self.D = D
        anc = np.empty((D, C), dtype=np.int64)
        anc[0] = np.arange(C)
        for d in range(1, D):
            anc[d] = parc[anc[d - 1]]
        self.anc = anc

        # children in ascending id order: stable sort by parent
        order = np.argsort(self.par, kind="stable")
        self.kidflat = order[1:]  # drop the root's -1 entry
        cnt = np.bincount(self.par[self.par >= 0], minlength=C)
        self.kidcnt = cnt.astype(np.int64)
        self.kidoff = np.concatenate(([0], np.cumsum(cnt))).astype(np.int64)
        self.ids_by_level = [
            np.flatnonzero(self.level == lv) for lv in range(self.k + 1)
        ]

        # subtree sizes bottom-up, then preorder intervals top-down;
        # within a parent, children keep ascending id order. Leaves sit
        # at mixed depths, so every per-level pass keeps only the cells
        # that actually have children.
        sub = np.ones(C, dtype=np.int64)
        for lv in range(self.k - 1, -1, -1):
            ids = self.ids_by_level[lv]
            ids = ids[self.kidcnt[ids] > 0]
            if not len(ids):
                continue
            idx, segstarts = _expand(self.kidoff[ids], self.kidcnt[ids])
            sub[ids] += np.add.reduceat(sub[self.kidflat[idx]], segstarts)
        self.sub = sub
        lo = np.zeros(C, dtype=np.int64)
        for lv in range(self.k):
            ids = self.ids_by_level[lv]
            ids = ids[self.kidcnt[ids] > 0]
            if not len(ids):
                continue
            idx, segstarts = _expand(self.kidoff[ids], self.kidcnt[ids])
            ch = self.kidflat[idx]
            vals = sub[ch]
            cs = np.cumsum(vals) - vals
            cnts = self.kidcnt[ids]
            before = cs - np.repeat(cs[segstarts], cnts)
            lo[ch] = np.repeat(lo[ids] + 1, cnts) + before
        self.pre_lo = lo
        self.pre_hi = lo + sub
        self.by_pre = np.argsort(lo)
        # ancestors worth a registry: subtree too big to sweep
        self.big = sub > _SWEEP_MAX

        # per cell, its big proper ancestors as a CSR table; new live
        # shifts register exactly there. The root is left out: it is
        # never a child, so never lands in a step's outside set, and a
        # registry nothing ever drains would only leak
        pairs_c = []
        pairs_a = []
        allc = np.arange(C, dtype=np.int64)
        for d in range(1, D):
            sel = allc[self.level >= d]
            a = anc[d][sel]
            keep = self.big[a] & (a != 0)
            pairs_c.append(sel[keep])
            pairs_a.append(a[keep])
        pc = np.concatenate(pairs_c) if pairs_c else np.empty(0, dtype=np.int64)
        pa = np.concatenate(pairs_a) if pairs_a else np.empty(0, dtype=np.int64)
        ordb = np.argsort(pc, kind="stable")
        self.biganc_flat = pa[ordb].astype(np.int32)
        bcnt = np.bincount(pc, minlength=C)
        self.biganc_cnt = bcnt.astype(np.int64)
        self.biganc_off = np.concatenate(([0], np.cumsum(bcnt))).astype(np.int64)

        # flattened per-cell classification matrices for refined cells
        refined = [c for c in cells if c.class_mat is not None]
        self.cbase = np.full(C, -1, dtype=np.int64)
        off = 0
        mats = []
        for c in refined:
            self.cbase[c.id] = off
            off += c.class_mat.size
            mats.append(c.class_mat.ravel())
        self.clsflat = (
            np.concatenate(mats) if mats else np.empty(0, dtype=np.int8)
        )
        self._refined = refined

    def _build_line_arrays(self) -> None:
        # per-line lists of refined crossed cells with the line's row in
        # each cell's conflict order; crossed leaves are handled through
        # the per-point tables instead
        m = self.m
        refined = self._refined
        if refined:
            lids = np.concatenate([c.conflict for c in refined])
            owners = np.concatenate(
                [np.full(len(c.conflict), c.id, dtype=np.int64) for c in refined]
            )
            rows = np.concatenate(
                [np.arange(len(c.conflict), dtype=np.int64) for c in refined]
            )
            ordl = np.argsort(lids, kind="stable")
            lids = lids[ordl]
            self.rflat = owners[ordl].astype(np.int32)
            self.rowflat = rows[ordl].astype(np.int32)
            ids = np.arange(m)
            self.roff = np.concatenate(
                (np.searchsorted(lids, ids), [len(lids)])
            ).astype(np.int64)
        else:
            self.rflat = np.empty(0, dtype=np.int64)
            self.rowflat = np.empty(0, dtype=np.int64)
            self.roff = np.zeros(m + 1, dtype=np.int64)
        self.la = np.fromiter((ln[0] for ln in self.cut.lines), dtype=np.int64, count=m)
        self.lb = np.fromiter((ln[1] for ln in self.cut.lines), dtype=np.int64, count=m)
        self.lc = np.fromiter((ln[2] for ln in self.cut.lines), dtype=np.int64, count=m)

    def _locate_points(self, points: Sequence[WeightedPoint]) -> None:
        C = self.C
        self.leaf_of = np.full(self.P, -1, dtype=np.int64)
        mem_pts = [points[int(pid)] for pid in self.members]
        if mem_pts:
            self.leaf_of[self.members] = np.asarray(
                self.cut.locate_many(mem_pts), dtype=np.int64
            )
        lcnt = np.zeros(C, dtype=np.int64)
        if len(self.members):
            np.add.at(lcnt, self.leaf_of[self.members], 1)
        self.lp_cnt = lcnt
        self.lp_off = np.concatenate(([0], np.cumsum(lcnt))).astype(np.int64)
        ordp = np.lexsort((self.members, self.leaf_of[self.members]))
        self.lp_pts = self.members[ordp]
        self.occupied = lcnt > 0

        # the same points sorted by leaf preorder, so any subtree's
        # points are one contiguous slice
        key = self.pre_lo[self.leaf_of[self.members]]
        ord2 = np.lexsort((self.members, key))
        self.lp2_pts = self.members[ord2]
        self._lp2_key = key[ord2]

        # per step: the points in crossed occupied leaves, with the sign
        # of each point against the step line, both precomputed flat
        cl_sizes = np.fromiter(
            (len(x) for x in self.cut.crossed_leaves), dtype=np.int64, count=self.m
        )
        if int(cl_sizes.sum()):
            cl_all = np.concatenate(self.cut.crossed_leaves)
            line_of = np.repeat(np.arange(self.m), cl_sizes)
            keepm = self.occupied[cl_all]
            keep = cl_all[keepm]
            line_of = line_of[keepm]
            cnts = self.lp_cnt[keep]
            idx, _ = _expand(self.lp_off[keep], cnts)
            self.pl_pts = self.lp_pts[idx].astype(np.int32)
            pl_line = np.repeat(line_of, cnts)
            self.pl_off = np.concatenate(
                ([0], np.cumsum(np.bincount(pl_line, minlength=self.m)))
            ).astype(np.int64)
            sides = (
                self.px[self.pl_pts] * self.la[pl_line]
                + self.py[self.pl_pts] * self.lb[pl_line]
                - self.lc[pl_line]
            )
            self.pl_sign = np.sign(sides).astype(np.int8)
        else:
            self.pl_pts = np.empty(0, dtype=np.int64)
            self.pl_off = np.zeros(self.m + 1, dtype=np.int64)
            self.pl_sign = np.empty(0, dtype=np.int8)

    def _build_state(self) -> None:
        C, P = self.C, self.P
        self.shift_p = np.zeros(P, dtype=np.int64)
        self.reset_p = np.zeros(P, dtype=np.int64)
        self.enl_p = np.zeros(P, dtype=bool)
        self.shift_c = np.zeros(C, dtype=np.int64)
        self.reset_c = np.zeros(C, dtype=np.int64)
        self.enl_c = np.zeros(C, dtype=bool)
        self.minc = np.full(C, _INF, dtype=np.int64)
        self.marg = np.full(C, -1, dtype=np.int64)
        # boundary-exactness overrides: the step a point's cost was
        # re-pinned and the reset index it should still report
        self.ovr_birth = np.full(P, -1, dtype=np.int64)
        self.ovr_eff = np.zeros(P, dtype=np.int64)
        # live-shift registrations by big-subtree ancestor, as chunks of
        # encoded ids (cells as id, points as C + id)
        self._reg: dict[int, list[np.ndarray]] = {}
        self._regsize = np.zeros(C, dtype=np.int64)
        # conservative "may hold a live shift strictly below" flags that
        # gate the sweeps; never falsely clear
        self.dirty = np.zeros(C, dtype=bool)
        # oversized leaves keep an addressable heap of w + shift
        self._heap: dict[int, IndexedHeap] = {}
        for leaf in np.flatnonzero(self.lp_cnt >= _HEAP_MIN).tolist():
            lo, hi = self.lp_off[leaf], self.lp_off[leaf + 1]
            self._heap[leaf] = IndexedHeap(
                (int(pid), int(self.w[pid])) for pid in self.lp_pts[lo:hi]
            )

    def _build_exc(self, boundary: Sequence[tuple[int, int]]) -> None:
        # out-of-band points per step (exactly on the step's line)
        self.exc: list[list[int]] = [[] for _ in range(self.m)]
        if not boundary:
            return
        step_of = {hid: j for j, hid in enumerate(self.inst.hseq)}
        memset = set(int(x) for x in self.members)
        for pid, hid in boundary:
            j = step_of.get(hid)
            if j is not None and pid in memset:
                self.exc[j].append(int(pid))

    def _init_minima(self) -> None:
        occ = np.flatnonzero(self.occupied)
        if len(occ):
            cnts = self.lp_cnt[occ]
            idx, segstarts = _expand(self.lp_off[occ], cnts)
            pts = self.lp_pts[idx]
            v, g = _seg_min(self.w[pts], pts, segstarts, cnts)
            self.minc[occ] = v
            self.marg[occ] = g
        for lv in range(self.k - 1, -1, -1):
            ids = self.ids_by_level[lv]
            ids = ids[self.kidcnt[ids] > 0]
            if len(ids):
                self._recompute_cells(ids)

    # --- shared helpers -------------------------------------------------

    def _ps(self, cells_arr: np.ndarray) -> np.ndarray:
        """Sum of cell shifts from each cell up to the root, inclusive."""
        # rows past the deepest cell are root clamps with zero shift
        d = int(self.level[cells_arr].max()) + 1
        return self.shift_c[self.anc[:d, cells_arr]].sum(axis=0)

    def _pathmax(self, cell: int) -> int:
        """Largest reset step recorded on a cell's path to the root."""
        return int(self.reset_c[self.anc[:, cell]].max())

    def _eff(self, pid: int) -> int:
        """Step at which a point's cost was last re-based (0 if never)."""
        nat = max(int(self.reset_p[pid]), self._pathmax(int(self.leaf_of[pid])))
        if self.ovr_birth[pid] >= nat:
            return int(self.ovr_eff[pid])
        return nat

    def _cost_of(self, pid: int) -> int:
        leaf = int(self.leaf_of[pid])
        ps = int(self.shift_c[self.anc[:, leaf]].sum())
        return int(self.w[pid]) + int(self.shift_p[pid]) + ps

    def _recompute_cells(self, cells_arr: np.ndarray) -> np.ndarray:
        """Refresh cached minima of internal cells from their children.

        Returns the subset whose cached (minimum, point) pair changed.
        """
        if len(cells_arr) <= _TINY:
            minc, marg, shift = self.minc, self.marg, self.shift_c
            kidflat = self.kidflat
            changed = []
            for c in cells_arr.tolist():
                v, g = _INF, -1
                for ch in kidflat[self.kidoff[c] : self.kidoff[c + 1]].tolist():
                    cv = int(minc[ch]) + int(shift[ch])
                    cg = int(marg[ch])
                    if cv < v or (cv == v and cg < g):
                        v, g = cv, cg
                if v >= _BIG:
                    v, g = _INF, -1
                if v != minc[c] or g != marg[c]:
                    minc[c] = v
                    marg[c] = g
                    changed.append(c)
            return np.asarray(changed, dtype=np.int64)
        cnts = self.kidcnt[cells_arr]
        idx, segstarts = _expand(self.kidoff[cells_arr], cnts)
        ch = self.kidflat[idx]
        vals = self.minc[ch] + self.shift_c[ch]
        v, g = _seg_min(vals, self.marg[ch], segstarts, cnts)
        big = v >= _BIG
        v[big] = _INF
        g[big] = -1
        changed = (v != self.minc[cells_arr]) | (g != self.marg[cells_arr])
        self.minc[cells_arr] = v
        self.marg[cells_arr] = g
        return cells_arr[changed]

    def _leaf_minima(self, leaves: np.ndarray) -> np.ndarray:
        """Refresh cached minima of occupied leaves; returns the changed."""
        leaves = np.unique(leaves)
        if not len(leaves):
            return leaves
        v = np.empty(len(leaves), dtype=np.int64)
        g = np.empty(len(leaves), dtype=np.int64)
        heap_sel = self.lp_cnt[leaves] >= _HEAP_MIN
        small = np.flatnonzero(~heap_sel)
        if len(small):
            sl = leaves[small]
            cnts = self.lp_cnt[sl]
            idx, segstarts = _expand(self.lp_off[sl], cnts)
            pts = self.lp_pts[idx]
            sv, sg = _seg_min(self.w[pts] + self.shift_p[pts], pts, segstarts, cnts)
            v[small] = sv
            g[small] = sg
        for j in np.flatnonzero(heap_sel).tolist():
            key, pid = self._heap[int(leaves[j])].peek()
            v[j], g[j] = key, pid
        changed = (v != self.minc[leaves]) | (g != self.marg[leaves])
        self.minc[leaves] = v
        self.marg[leaves] = g
        return leaves[changed]

    def _heap_update(self, pids: np.ndarray) -> None:
        """Push current w + shift keys for points living in heap leaves."""
        if not self._heap or not len(pids):
            return
        for pid in pids.tolist():
            leaf = int(self.leaf_of[pid])
            h = self._heap.get(leaf)
            if h is not None:
                h.update(pid, int(self.w[pid]) + int(self.shift_p[pid]))

    def _register(self, enc: np.ndarray, owners: np.ndarray) -> None:
        """File encoded markers under ancestor cells, one chunk each."""
        if not len(enc):
            return
        order = np.argsort(owners)
        so = owners[order]
        sm = enc[order].astype(np.int32)
        cutpts = np.flatnonzero(so[1:] != so[:-1]) + 1
        starts = np.concatenate(([0], cutpts))
        ends = np.concatenate((cutpts, [len(so)]))
        for s, e in zip(starts.tolist(), ends.tolist()):
            a = int(so[s])
            self._reg.setdefault(a, []).append(sm[s:e])
            self._regsize[a] += e - s

    def _enlist_points(self, pids: np.ndarray, buf: list) -> None:
        """Queue unenlisted point shifts for the big cells on their path."""
        fresh = pids[~self.enl_p[pids]]
        if not len(fresh):
            return
        self.enl_p[fresh] = True
        leaves = self.leaf_of[fresh]
        cnts = self.biganc_cnt[leaves]
        idx, _ = _expand(self.biganc_off[leaves], cnts)
        if len(idx):
            buf.append((np.repeat(fresh + self.C, cnts), self.biganc_flat[idx]))

    def _enlist_cells(self, cids: np.ndarray, buf: list) -> None:
        """Queue unenlisted cell shifts for their big proper ancestors."""
        fresh = cids[~self.enl_c[cids]]
        if not len(fresh):
            return
        self.enl_c[fresh] = True
        cnts = self.biganc_cnt[fresh]
        idx, _ = _expand(self.biganc_off[fresh], cnts)
        if len(idx):
            buf.append((np.repeat(fresh, cnts), self.biganc_flat[idx]))

    def _file_markers(self, buf: list) -> None:
        """File all queued markers with one grouping pass.

        Queuing is sound within a step because nothing a step enlists
        can sit below the same step's outside cells, so the step's own
        flushes never need the queued entries.
        """
        if not buf:
            return
        if len(buf) == 1:
            enc, own = buf[0]
        else:
            enc = np.concatenate([e for e, _ in buf])
            own = np.concatenate([o for _, o in buf])
        self._register(enc, own)

    def _flush_registry(self, cids: list[int], touched_cells: list,
                        touched_leaves: list) -> None:
        """Zero every live shift registered below the given big cells.

        Stale entries (already zeroed from elsewhere) are skipped via
        the enlisted flags.  The cells' subtrees are disjoint, so one
        merged drain is sound.
        """
        chunks: list[np.ndarray] = []
        for cid in cids:
            got = self._reg.pop(cid, None)
            if got:
                chunks.extend(got)
            self._regsize[cid] = 0
        if not chunks:
            return
        # duplicates across chunks are harmless: zeroing and flag
        # clearing are idempotent and downstream consumers deduplicate
        arr = np.concatenate(chunks) if len(chunks) > 1 else chunks[0]
        cs = arr[arr < self.C]
        ps = arr[arr >= self.C] - self.C
        cs = cs[self.enl_c[cs]]
        ps = ps[self.enl_p[ps]]
        if len(cs):
            self.shift_c[cs] = 0
            self.reset_c[cs] = 0
            self.enl_c[cs] = False
            touched_cells.append(cs)
        if len(ps):
            self.shift_p[ps] = 0
            self.reset_p[ps] = 0
            self.enl_p[ps] = False
            self._heap_update(ps)
            touched_leaves.append(self.leaf_of[ps])

    def _sweep(self, cids: np.ndarray) -> None:
        """Directly restore small disjoint subtrees to the no-shift state.

        Interior cells and points are zeroed by preorder slices and the
        cached minima snap back to their precomputed shift-free values,
        so nothing inside needs propagation; the caller still refreshes
        the swept roots' own contributions.
        """
        los = self.pre_lo[cids]
        his = self.pre_hi[cids]
        icnt = his - los - 1  # interior cells, excluding the root of each
        if int(icnt.sum()):
            nz = icnt > 0
            idx, _ = _expand(los[nz] + 1, icnt[nz])
            inner = self.by_pre[idx]
            self.shift_c[inner] = 0
            self.reset_c[inner] = 0
            self.enl_c[inner] = False
            self.dirty[inner] = False
            self.minc[inner] = self.minw0[inner]
            self.marg[inner] = self.marg0[inner]
        self.dirty[cids] = False
        self.minc[cids] = self.minw0[cids]
        self.marg[cids] = self.marg0[cids]
        plo = np.searchsorted(self._lp2_key, los)
        phi = np.searchsorted(self._lp2_key, his)
        pcnt = phi - plo
        if int(pcnt.sum()):
            nz = pcnt > 0
            idx, _ = _expand(plo[nz], pcnt[nz])
            pts = self.lp2_pts[idx]
            self.shift_p[pts] = 0
            self.reset_p[pts] = 0
            self.enl_p[pts] = False
            if self._heap:
                self._heap_update(pts)

    def _propagate(self, direct: list, touched_cells: list,
                   touched_leaves: list) -> None:
        """Refresh cached minima bottom-up.

        direct lists cells to recompute as given, each array in
        ascending id order; entries of the other two lists changed
        themselves, so their parents are recomputed.
        Buckets are by level (leaves sit at mixed depths) and parents of
        level-i cells are always at level i - 1, so one downward pass
        settles everything and stops cold where nothing changed.
        """
        pend: list[list[np.ndarray]] = [[] for _ in range(self.k + 1)]

        def bucket_parents(cells_arr: np.ndarray) -> None:
            pars = self.par[cells_arr]
            pars = pars[pars >= 0]
            if len(pars):
                bucket(pars)

        def bucket(cells_arr: np.ndarray) -> None:
            lvs = self.level[cells_arr]
            for lv in np.unique(lvs).tolist():
                pend[lv].append(cells_arr[lvs == lv])

        def bucket_banded(cells_arr: np.ndarray) -> None:
            # cell ids ascend level by level, so an ascending-id list is
            # level-sorted and splits at searchsorted band edges
            lvs = self.level[cells_arr]
            lo, hi = int(lvs[0]), int(lvs[-1])
            if lo == hi:
                pend[lo].append(cells_arr)
                return
            edges = np.searchsorted(lvs, np.arange(lo + 1, hi + 1))
            for lv, seg in enumerate(np.split(cells_arr, edges), start=lo):
                if len(seg):
                    pend[lv].append(seg)

        if touched_leaves:
            changed = self._leaf_minima(np.concatenate(touched_leaves))
            if len(changed):
                bucket_parents(changed)
        if touched_cells:
            allc = (
                np.concatenate(touched_cells)
                if len(touched_cells) > 1
                else touched_cells[0]
            )
            bucket_parents(allc)
        for arr in direct:
            if len(arr):
                bucket_banded(arr)
        for lv in range(self.k - 1, -1, -1):
            if not pend[lv]:
                continue
            cur = np.concatenate(pend[lv]) if len(pend[lv]) > 1 else pend[lv][0]
            changed = self._recompute_cells(np.unique(cur))
            if len(changed) and lv:
                pend[lv - 1].append(self.par[changed])

    # --- per-step arrays -------------------------------------------------

    def _step_arrays(self, li: int) -> dict:
        """Crossed-cell expansions and path sums for one step line.

        ancR stacks the ancestors of every crossed cell, computed once
        and shared by the minimum scan, the reset, and the dirty-flag
        scatter.  psi and pso carry the path sums of the inside and
        outside children, derived from their parents' sums: valid until
        a cell shift changes, which within a step happens only to the
        outside children themselves after these values were consumed.
        """
        R = self.rflat[self.roff[li] : self.roff[li + 1]]
        ins = outs = psi = pso = ancR = None
        if len(R):
            dR = int(self.level[R].max()) + 1
            ancR = self.anc[:dR, R]
            ps_par = self.shift_c[ancR].sum(axis=0)
            row = self.rowflat[self.roff[li] : self.roff[li + 1]]
            wid = self.kidcnt[R]
            idx, _ = _expand(self.kidoff[R], wid)
            d = idx - np.repeat(self.kidoff[R], wid)
            ch = self.kidflat[idx]
            cls = self.clsflat[np.repeat(self.cbase[R] + row * wid, wid) + d]
            ps_kid = np.repeat(ps_par, wid)
            isin = cls == 1
            isout = cls == -1
            ins = ch[isin]
            outs = ch[isout]
            psi = ps_kid[isin] + self.shift_c[ins]
            pso = ps_kid[isout]
        else:
            ins = outs = np.empty(0, dtype=np.int64)
        sl = slice(self.pl_off[li], self.pl_off[li + 1])
        return {
            "li": li,
            "R": R,
            "ancR": ancR,
            "ins": ins,
            "outs": outs,
            "psi": psi,
            "pso": pso,
            "pts": self.pl_pts[sl],
            "sign": self.pl_sign[sl],
        }

    # --- the two step operations ------------------------------------------

    def find_min_cost(self, step: int) -> tuple[int | float, int, int]:
        """Cheapest point inside the half-plane of 1-based step.

        Returns (delta, point id, point's last reset step); delta is
        math.inf with id -1 when no point hits the half-plane.  Ties go
        to the smallest point id.
        """
        li = step - 1
        arrs = self._step_arrays(li)
        self._stash = arrs
        best = _INF
        best_pid = -1

        ins = arrs["ins"]
        if len(ins):
            xi = self.minc[ins] + arrs["psi"]
            ok = np.flatnonzero(self.minc[ins] < _BIG)
            if len(ok):
                sub = xi[ok]
                lo = int(sub.min())
                if lo <= best:
                    at = ok[np.flatnonzero(sub == lo)]
                    pid = int(self.marg[ins[at]].min())
                    if lo < best or pid < best_pid:
                        best, best_pid = lo, pid

        pts = arrs["pts"]
        if len(pts):
            hit = pts[arrs["sign"] >= 0]
            if len(hit):
                costs = (
                    self.w[hit] + self.shift_p[hit] + self._ps(self.leaf_of[hit])
                )
                lo = int(costs.min())
                if lo < best:
                    best = lo
                    best_pid = int(hit[np.flatnonzero(costs == lo)].min())
                elif lo == best:
                    pid = int(hit[np.flatnonzero(costs == lo)].min())
                    best_pid = min(best_pid, pid)

        for pid in self.exc[li]:
            c = self._cost_of(pid)
            if c < best or (c == best and pid < best_pid):
                best, best_pid = c, pid

        if best >= _BIG:
            return inf, -1, 0
        return best, best_pid, self._eff(best_pid)

    def reset_cost(self, step: int, delta: int) -> None:
        """Re-base everything strictly outside the step's half-plane.

        Afterwards every such point costs its weight plus delta, and
        both the path-shift decomposition and the cached minima hold
        again.  Points exactly on the line keep cost and reset step.
        """
        li = step - 1
        arrs = (
            self._stash
            if self._stash and self._stash["li"] == li
            else self._step_arrays(li)
        )
        self._stash = None
        touched_cells: list[np.ndarray] = []
        touched_leaves: list[np.ndarray] = []
        markers: list[tuple[np.ndarray, np.ndarray]] = []

        snaps = [(pid, self._cost_of(pid), self._eff(pid)) for pid in self.exc[li]]

        # every proper ancestor of a crossed leaf or of an outside child
        # is itself a crossed cell, so one scatter over the crossed
        # cells' ancestor stack marks everything both phases below need
        if arrs["ancR"] is not None:
            self.dirty[arrs["ancR"]] = True

        pts = arrs["pts"]
        outp = pts[arrs["sign"] < 0]
        if len(outp):
            leaves = self.leaf_of[outp]
            self.shift_p[outp] = delta - self._ps(leaves)
            self.reset_p[outp] = step
            self._enlist_points(outp, markers)
            self._heap_update(outp)
            self.dirty[leaves] = True
            touched_leaves.append(leaves)

        outs = arrs["outs"]
        if len(outs):
            isbig = self.big[outs]
            flushable = outs[isbig & (self._regsize[outs] > 0)]
            if len(flushable):
                self._flush_registry(
                    flushable.tolist(), touched_cells, touched_leaves
                )
            small = outs[~isbig]
            if len(small):
                sw = small[self.dirty[small]]
                if len(sw):
                    self._sweep(sw)
            self.shift_c[outs] = delta - arrs["pso"]
            self.reset_c[outs] = step
            self._enlist_cells(outs, markers)

        for pid, cost_b, eff_b in snaps:
            leaf = int(self.leaf_of[pid])
            ps = int(self.shift_c[self.anc[:, leaf]].sum())
            self.shift_p[pid] = cost_b - int(self.w[pid]) - ps
            self.ovr_birth[pid] = step
            self.ovr_eff[pid] = eff_b
            one = np.asarray([pid], dtype=np.int64)
            self._enlist_points(one, markers)
            self._heap_update(one)
            self.dirty[self.anc[:, leaf]] = True
            touched_leaves.append(np.asarray([leaf], dtype=np.int64))

        self._file_markers(markers)
        # the crossed cells are exactly the parents of this step's child
        # splits, so they cover the outside children and swept roots
        self._propagate([arrs["R"]], touched_cells, touched_leaves)

        if self.check:
            a, b, c = (int(self.la[li]), int(self.lb[li]), int(self.lc[li]))
            for pid in self.members.tolist():
                if self.px[pid] * a + self.py[pid] * b - c < 0:
                    self._shadow_cost[pid] = int(self.w[pid]) + delta
                    self._shadow_reset[pid] = step
            self._check_state()

    def run(self) -> IndirectSolution:
        """Process the whole sequence; same contract as the baseline."""
        if self.m == 0:
            return IndirectSolution(value=0, points=frozenset(), step_mins=())
        step_mins: list[int | float] = []
        arg_points: list[int] = []
        arg_resets: list[int] = []
        for step in range(1, self.m + 1):
            delta, pid, eff = self.find_min_cost(step)
            step_mins.append(delta)
            if pid < 0:
                return IndirectSolution(
                    value=inf, points=None, step_mins=tuple(step_mins)
                )
            arg_points.append(pid)
            arg_resets.append(eff)
            self.reset_cost(step, delta)
        return IndirectSolution(
            value=step_mins[-1],
            points=backtrack(arg_points, arg_resets),
            step_mins=tuple(step_mins),
        )

    # --- full-state recheck ----------------------------------------------

    def _check_state(self) -> None:
        for pid in self.members.tolist():
            got = self._cost_of(pid)
            want = self._shadow_cost[pid]
            if got != want:
                raise InvariantError(
                    f"point {pid}: decomposed cost {got} != expected {want}"
                )
            eff = self._eff(pid)
            if eff != self._shadow_reset[pid]:
                raise InvariantError(
                    f"point {pid}: reset step {eff} != expected "
                    f"{self._shadow_reset[pid]}"
                )
        if self.shift_c[0] != 0 or self.reset_c[0] != 0:
            raise InvariantError("root cell must never carry a shift")
        self.check_minima()
        self._check_registration()

    def check_minima(self) -> None:
        """Recompute every cached (minimum, point) pair and compare."""
        minc = np.full(self.C, _INF, dtype=np.int64)
        marg = np.full(self.C, -1, dtype=np.int64)
        occ = np.flatnonzero(self.occupied)
        if len(occ):
            cnts = self.lp_cnt[occ]
            idx, segstarts = _expand(self.lp_off[occ], cnts)
            pts = self.lp_pts[idx]
            v, g = _seg_min(self.w[pts] + self.shift_p[pts], pts, segstarts, cnts)
            minc[occ] = v
            marg[occ] = g
        for lv in range(self.k - 1, -1, -1):
            ids = self.ids_by_level[lv]
            ids = ids[self.kidcnt[ids] > 0]
            if not len(ids):
                continue
            cnts = self.kidcnt[ids]
            idx, segstarts = _expand(self.kidoff[ids], cnts)
            ch = self.kidflat[idx]
            v, g = _seg_min(minc[ch] + self.shift_c[ch], marg[ch], segstarts, cnts)
            big = v >= _BIG
            v[big] = _INF
            g[big] = -1
            minc[ids] = v
            marg[ids] = g
        bad = np.flatnonzero((minc != self.minc) | (marg != self.marg))
        if len(bad):
            c = int(bad[0])
            raise InvariantError(
                f"cell {c}: cached minimum ({int(self.minc[c])}, "
                f"{int(self.marg[c])}) != recomputed ({int(minc[c])}, {int(marg[c])})"
            )

    def _check_registration(self) -> None:
        """Every live shift must be on file with its big proper ancestors."""
        filed: dict[int, set[int]] = {}
        for cid, chunks in self._reg.items():
            if not self.big[cid]:
                raise InvariantError(f"registry at sweep-sized cell {cid}")
            filed[cid] = set(np.concatenate(chunks).tolist()) if chunks else set()

        def expect(enc: int, cell: int, skip_self: bool) -> None:
            d0 = 1 if skip_self else 0
            for d in range(d0, int(self.level[cell]) + 1):
                a = int(self.anc[d][cell])
                if a == 0:
                    continue  # the root never drains, so never files
                if self.big[a] and enc not in filed.get(a, ()):
                    raise InvariantError(
                        f"live shift {enc} missing from cell {a}'s registry"
                    )
                if not self.big[a] and not self.dirty[a]:
                    raise InvariantError(
                        f"live shift {enc} below cell {a} left it marked clean"
                    )

        for cid in np.flatnonzero(self.enl_c).tolist():
            expect(cid, cid, skip_self=True)
        for pid in np.flatnonzero(self.enl_p).tolist():
            expect(pid + self.C, int(self.leaf_of[pid]), skip_self=False)
        for pid in np.flatnonzero(~self.enl_p).tolist():
            if self.shift_p[pid] or self.reset_p[pid]:
                raise InvariantError(f"point {pid} carries an unregistered shift")
        unl = np.flatnonzero(~self.enl_c)
        if (self.shift_c[unl] != 0).any() or (self.reset_c[unl] != 0).any():
            raise InvariantError("cell carries an unregistered shift")


def run_candidate(
    cut: HierarchicalCutting | None,
    inst: CandidateInstance,
    points: Sequence[WeightedPoint],
    weights: Sequence[int],
    boundary: Sequence[tuple[int, int]] = (),
    check_invariants: bool = False,
) -> IndirectSolution:
    """Solve one candidate instance against its cutting.

    cut may be None only for an empty sequence, which needs no geometry.
    """
    if len(inst.hseq) == 0:
        return IndirectSolution(value=0, points=frozenset(), step_mins=())
    if cut is None:
        raise ValueError("a cutting is required for a non-empty sequence")
    return FastEngine(
        cut, inst, points, weights, boundary=boundary,
        check_invariants=check_invariants,
    ).run()
