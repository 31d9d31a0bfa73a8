"""Exact geometry on the cell lattice: hulls, shoelace areas, perimeters, collinearity.

All inputs that come from grid cells are lattice points (cell corners or cell
indices), so everything up to the final square roots is integer arithmetic.
That keeps swap-gain comparisons free of floating-point tie noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

Point = tuple[float, float]
Cell = tuple[int, int]


class DegenerateHullError(ValueError):
    """Raised when a hull is requested for a collinear point set."""


@dataclass(frozen=True)
class Polygon:
    """Simple polygon given by ordered vertices in corner units.

    Counterclockwise vertex order encloses positive area; clockwise rings
    (holes) carry negative signed area.
    """

    vertices: tuple[Point, ...]

    def __post_init__(self) -> None:
        if len(self.vertices) < 3:
            raise ValueError("polygon needs at least 3 vertices")
        if signed_area(self.vertices) == 0:
            raise ValueError("polygon has zero area")

    @property
    def signed_area(self) -> float:
        return signed_area(self.vertices)


def signed_area(vertices: Sequence[Point]) -> float:
    """Shoelace signed area; exact when all coordinates are integers."""
    acc = 0
    n = len(vertices)
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        acc += x1 * y2 - x2 * y1
    return acc / 2


def polygon_area(p: Polygon) -> float:
    """Positive enclosed area in square cell units."""
    return abs(p.signed_area)


def polygon_perimeter(p: Polygon) -> float:
    """Sum of Euclidean edge lengths in cell units."""
    total = 0.0
    n = len(p.vertices)
    for i in range(n):
        x1, y1 = p.vertices[i]
        x2, y2 = p.vertices[(i + 1) % n]
        total += math.hypot(x2 - x1, y2 - y1)
    return total


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Iterable[Point]) -> Polygon:
    """Counterclockwise convex hull via Andrew's monotone chain.

    Collinear points along hull edges are dropped, so no three consecutive
    hull vertices are collinear.  Raises DegenerateHullError when every
    input point lies on one line.
    """
    pts = sorted(set((p[0], p[1]) for p in points))
    if len(pts) < 3:
        raise DegenerateHullError("need at least 3 distinct points")
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise DegenerateHullError("all points collinear")
    return Polygon(tuple(hull))


def hull_of_cells(cells: Iterable[Cell]) -> Polygon:
    """Convex hull of the union of unit squares of the given cells."""
    corners = set()
    for c, r in cells:
        corners.update(((c, r), (c + 1, r), (c, r + 1), (c + 1, r + 1)))
    return convex_hull(corners)


@dataclass(frozen=True)
class TripleCounts:
    total: int
    satisfied: int


def collinear_triple_counts(cells: Iterable[Cell]) -> TripleCounts:
    """Count collinear (X, Y, Z) triples of lattice cell centers.

    For each unordered pair (X, Z) in `cells`, every lattice center strictly
    between them on the segment contributes one triple; `satisfied` counts
    those whose middle cell is also in `cells`.  A pair at offset (dx, dy)
    has gcd(|dx|, |dy|) - 1 strictly interior lattice points.
    """
    pts = np.asarray(sorted(set((int(c), int(r)) for c, r in cells)), dtype=np.int64)
    if pts.size == 0:
        raise ValueError("cells must be nonempty")
    m = len(pts)
    if m < 2:
        return TripleCounts(0, 0)
    iu, ju = np.triu_indices(m, k=1)
    d = pts[ju] - pts[iu]
    g = np.gcd(np.abs(d[:, 0]), np.abs(d[:, 1]))
    total = int((g - 1).sum())
    if total == 0:
        return TripleCounts(0, 0)
    sel = np.flatnonzero(g >= 2)
    reps = g[sel] - 1
    pid = np.repeat(np.arange(len(sel)), reps)
    offsets = np.concatenate(([0], np.cumsum(reps)[:-1]))
    t = np.arange(reps.sum()) - np.repeat(offsets, reps) + 1
    step = d[sel] // g[sel, None]
    y = pts[iu[sel]][pid] + t[:, None] * step[pid]
    minc, minr = pts[:, 0].min(), pts[:, 1].min()
    occ = np.zeros((pts[:, 1].max() - minr + 1, pts[:, 0].max() - minc + 1), dtype=bool)
    occ[pts[:, 1] - minr, pts[:, 0] - minc] = True
    satisfied = int(occ[y[:, 1] - minr, y[:, 0] - minc].sum())
    return TripleCounts(total, satisfied)


def halfplane_area_fraction(shape, edge: tuple[Point, Point]) -> float:
    """Fraction of a shape's cell area on the interior side of a boundary edge.

    `edge` is a unit axis-aligned segment on the boundary of the union of
    cell squares; the interior side is the side whose adjacent cell belongs
    to the shape.  Because boundary edges sit on integer lines, no cell is
    split and the fraction is an exact cell count ratio.
    """
    cells = frozenset((int(c), int(r)) for c, r in getattr(shape, "cells", shape))
    if not cells:
        raise ValueError("shape has no cells")
    (x1, y1), (x2, y2) = edge
    if x1 != int(x1) or y1 != int(y1) or x2 != int(x2) or y2 != int(y2):
        raise ValueError("boundary edge endpoints must be lattice corners")
    x1, y1, x2, y2 = int(x1), int(y1), int(x2), int(y2)
    dx, dy = x2 - x1, y2 - y1
    if sorted((abs(dx), abs(dy))) != [0, 1]:
        raise ValueError("edge must be a unit axis-aligned segment")
    n = len(cells)
    if dx == 0:
        k = x1
        r = min(y1, y2)
        right_in = (k, r) in cells
        left_in = (k - 1, r) in cells
        if right_in == left_in:
            raise ValueError("edge does not lie on the shape boundary")
        if right_in:
            count = sum(1 for c, _ in cells if c >= k)
        else:
            count = sum(1 for c, _ in cells if c < k)
    else:
        k = y1
        c = min(x1, x2)
        above_in = (c, k) in cells
        below_in = (c, k - 1) in cells
        if above_in == below_in:
            raise ValueError("edge does not lie on the shape boundary")
        if above_in:
            count = sum(1 for _, r in cells if r >= k)
        else:
            count = sum(1 for _, r in cells if r < k)
    return count / n
