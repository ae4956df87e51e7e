"""Shared instance generators for the test suite.

All generators take an explicit random.Random so failures reproduce from the
seed printed in the assertion message.
"""

from __future__ import annotations

import random

from hphs.geometry import HalfPlane, WeightedPoint


def rand_points(rng: random.Random, n: int, r: int = 40, wmax: int = 100):
    return [
        WeightedPoint(i, rng.randint(-r, r), rng.randint(-r, r), rng.randint(1, wmax))
        for i in range(n)
    ]


def rand_normal(rng: random.Random, nmax: int = 6) -> tuple[int, int]:
    a, b = 0, 0
    while (a, b) == (0, 0):
        a, b = rng.randint(-nmax, nmax), rng.randint(-nmax, nmax)
    return a, b


def rand_instance(rng: random.Random, n: int, m: int | None = None, r: int = 40):
    """Arbitrary instance; may be infeasible."""
    pts = rand_points(rng, n, r=r)
    hs = []
    for i in range(m if m is not None else n):
        a, b = rand_normal(rng)
        hs.append(HalfPlane(i, a, b, rng.randint(-r * 8, r * 8)))
    return pts, hs


def rand_feasible(rng: random.Random, n: int, m: int | None = None, r: int = 40):
    """Feasible by construction: every half-plane is anchored to some point."""
    pts = rand_points(rng, n, r=r)
    hs = []
    for i in range(m if m is not None else n):
        a, b = rand_normal(rng)
        p = rng.choice(pts)
        slack = rng.randint(0, 2 * r)
        hs.append(HalfPlane(i, a, b, a * p.x + b * p.y - slack))
    return pts, hs
