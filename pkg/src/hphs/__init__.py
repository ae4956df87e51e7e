"""Minimum-weight hitting set for half-planes.

Given n weighted points and n closed half-planes, pick a minimum-weight
subset of the points so that every half-plane contains at least one chosen
point.  The solver reduces the problem to covering points on a circle with
arcs and solves each candidate completion with either a plain quadratic
engine or a cutting-accelerated one.
"""

from .geometry import HalfPlane, Sidedness, WeightedPoint, side_of

__version__ = "0.1.0"

__all__ = [
    "HalfPlane",
    "WeightedPoint",
    "Sidedness",
    "side_of",
    "__version__",
]
