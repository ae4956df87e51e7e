"""Addressable binary min-heap keyed by (key, id).

The engine keeps one of these per populated leaf cell: the members are
point ids, the keys are current point costs, and a cost change must be
an O(log s) operation rather than a rebuild.  Ties order by id, so the
minimum is always the cheapest point with the smallest id.
"""

from __future__ import annotations

from typing import Iterable


class IndexedHeap:
    """Min-heap over distinct integer ids with updatable keys."""

    __slots__ = ("_ids", "_pos", "_key")

    def __init__(self, items: Iterable[tuple[int, int]] = ()):
        """Build from (id, key) pairs in O(s) by sift-down heapify."""
        self._ids: list[int] = []
        self._key: dict[int, int] = {}
        for eid, key in items:
            if eid in self._key:
                raise ValueError(f"duplicate id {eid}")
            self._key[eid] = key
            self._ids.append(eid)
        self._pos = {eid: i for i, eid in enumerate(self._ids)}
        for i in range(len(self._ids) // 2 - 1, -1, -1):
            self._sift_down(i)

    def __len__(self) -> int:
        return len(self._ids)

    def __contains__(self, eid: int) -> bool:
        return eid in self._key

    def _less(self, i: int, j: int) -> bool:
        a, b = self._ids[i], self._ids[j]
        ka, kb = self._key[a], self._key[b]
        return ka < kb or (ka == kb and a < b)

    def _swap(self, i: int, j: int) -> None:
        ids = self._ids
        ids[i], ids[j] = ids[j], ids[i]
        self._pos[ids[i]] = i
        self._pos[ids[j]] = j

    def _sift_up(self, i: int) -> None:
        while i > 0:
            up = (i - 1) // 2
            if not self._less(i, up):
                break
            self._swap(i, up)
            i = up

    def _sift_down(self, i: int) -> None:
        n = len(self._ids)
        while True:
            lo = i
            left = 2 * i + 1
            right = left + 1
            if left < n and self._less(left, lo):
                lo = left
            if right < n and self._less(right, lo):
                lo = right
            if lo == i:
                return
            self._swap(i, lo)
            i = lo

    def peek(self) -> tuple[int, int]:
        """(key, id) of the minimum; raises IndexError when empty."""
        if not self._ids:
            raise IndexError("peek on empty heap")
        eid = self._ids[0]
        return self._key[eid], eid

    def update(self, eid: int, key: int) -> None:
        """Set the key of a present id and restore heap order."""
        old = self._key[eid]
        if key == old:
            return
        self._key[eid] = key
        i = self._pos[eid]
        if key < old:
            self._sift_up(i)
        else:
            self._sift_down(i)

    def push(self, eid: int, key: int) -> None:
        if eid in self._key:
            raise ValueError(f"id {eid} already present")
        self._key[eid] = key
        self._ids.append(eid)
        self._pos[eid] = len(self._ids) - 1
        self._sift_up(len(self._ids) - 1)

    def remove(self, eid: int) -> None:
        """Delete a present id in O(log s)."""
        i = self._pos.pop(eid)
        del self._key[eid]
        last = self._ids.pop()
        if i == len(self._ids):
            return
        self._ids[i] = last
        self._pos[last] = i
        self._sift_down(i)
        self._sift_up(self._pos[last])

    def key_of(self, eid: int) -> int:
        return self._key[eid]
