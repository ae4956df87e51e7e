"""Baseline engine for the sequential coverage recurrence.

Given a candidate instance, process its half-plane sequence left to right.
Every point starts at its own weight; at step i the cheapest point inside
h_i is recorded, and every point outside h_i is re-based to its weight plus
that minimum.  The value after the last step is the cheapest way to cover
the whole sequence, and backtracking through the recorded minima recovers a
point set achieving it.

This implementation scans all points at every step, so it costs O(n*m) per
candidate.  It exists as the correctness baseline the cutting-accelerated
engine is checked against, and every quantity it touches is a plain Python
integer (infeasible steps use math.inf as a distinguished sentinel, never a
large number).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import inf
from typing import Callable, Sequence

from .reduction import CandidateInstance


@dataclass(frozen=True)
class IndirectSolution:
    """Result of one candidate run.

    ``value`` is the optimal completion weight (math.inf when some step had
    no point inside its half-plane).  ``points`` is a recovered point set of
    weight at most ``value``; it may be None only when the value is infinite.
    ``step_mins`` holds the per-step minima for diagnostics and tests.
    """

    value: int | float
    points: frozenset[int] | None
    step_mins: tuple[int | float, ...]


def backtrack(arg_points: Sequence[int], arg_resets: Sequence[int]) -> frozenset[int]:
    """Chain backwards through the recorded minima.

    Entry i names the point realizing step i's minimum and the step at which
    that point's cost was last re-based (0 when never).  Starting from the
    final step, each chosen point accounts for every step back to its
    re-basing step, where the chain continues.  Duplicates collapse via the
    set, which can only lower the total weight.
    """
    chosen: set[int] = set()
    i = len(arg_points)
    while i > 0:
        chosen.add(arg_points[i - 1])
        i = arg_resets[i - 1]
    return frozenset(chosen)


def run(
    inst: CandidateInstance,
    weights: Sequence[int],
    inside_row: Callable[[int], Sequence[bool]],
) -> IndirectSolution:
    """Solve one candidate instance by direct scanning.

    ``weights`` is indexed by point id; ``inside_row(hid)`` returns a
    sequence indexed by point id that is truthy where the point hits the
    half-plane.  Step minima tie-break to the smallest point id.
    """
    pids = inst.point_ids
    if not inst.hseq:
        return IndirectSolution(value=0, points=frozenset(), step_mins=())

    cost = list(weights)
    last_reset = [0] * len(weights)
    step_mins: list[int | float] = []
    arg_points: list[int] = []
    arg_resets: list[int] = []

    for i, hid in enumerate(inst.hseq, start=1):
        bits = inside_row(hid)
        best: int | float = inf
        best_pid = -1
        for pid in pids:
            if bits[pid] and cost[pid] < best:
                best = cost[pid]
                best_pid = pid
        step_mins.append(best)
        if best_pid < 0:
            return IndirectSolution(value=inf, points=None, step_mins=tuple(step_mins))
        arg_points.append(best_pid)
        arg_resets.append(last_reset[best_pid])
        for pid in pids:
            if not bits[pid]:
                cost[pid] = weights[pid] + best
                last_reset[pid] = i

    return IndirectSolution(
        value=step_mins[-1],
        points=backtrack(arg_points, arg_resets),
        step_mins=tuple(step_mins),
    )
