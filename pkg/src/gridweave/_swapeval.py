"""Incremental per-cluster scoring engines for the boundary-swap search.

The swap search evaluates O(|boundary|^2) candidate swaps per pass; scoring a
cluster from scratch for each candidate is far too slow at 40x40.  Instead
each cluster keeps exact integer fields from which the score of "remove one
cell, add one cell" variants follows in O(1) lookups plus two short lattice
ray walks per candidate.  Everything stays in integer arithmetic until the
final ratio, so candidate comparisons are tie-stable.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterable

import numpy as np

Cell = tuple[int, int]


@lru_cache(maxsize=None)
def _gcd_table(size: int) -> np.ndarray:
    a = np.arange(size, dtype=np.int64)
    t = np.gcd.outer(a, a)
    t[0, 0] = 1  # so that table[|d|] - 1 == 0 for a cell paired with itself
    return t


def _enumerate_between(px, py, qx, qy, g):
    """Lattice points strictly between (px,py) and (qx,qy), flattened.

    Returns (pair_index, x, y) arrays; `g` is the gcd of the absolute offsets.
    """
    sel = np.flatnonzero(g >= 2)
    if len(sel) == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty, empty
    gs = g[sel]
    reps = gs - 1
    pid = np.repeat(sel, reps)
    offsets = np.concatenate(([0], np.cumsum(reps)[:-1]))
    t = np.arange(int(reps.sum()), dtype=np.int64) - np.repeat(offsets, reps) + 1
    stepx = (qx[sel] - px[sel]) // gs
    stepy = (qy[sel] - py[sel]) // gs
    rix = np.repeat(np.arange(len(sel)), reps)
    x = px[sel][rix] + t * stepx[rix]
    y = py[sel][rix] + t * stepy[rix]
    return pid, x, y


class TripleField:
    """Exact collinear-triple bookkeeping for one cluster.

    For every grid cell x it maintains
      pair_tot[x] : sum over members q != x of (lattice points strictly between)
      pair_sat[x] : same sum counting only member between-points
      through[x]  : number of member pairs with x strictly between them
    together with the cluster totals `tot` and `sat`.  The triple score is
    sat/tot (vacuously 1 when tot == 0).
    """

    __slots__ = ("w", "h", "occ", "pair_tot", "pair_sat", "through", "tot", "sat", "n", "_gx", "_gy")

    def __init__(self, w: int, h: int, cells: Iterable[Cell]):
        self.w, self.h = w, h
        wh = w * h
        table = _gcd_table(max(w, h) + 1)
        pts = np.asarray(sorted(cells), dtype=np.int64)
        if pts.size == 0:
            raise ValueError("cluster must be nonempty")
        self.n = len(pts)
        self._gx = np.arange(wh, dtype=np.int64) % w
        self._gy = np.arange(wh, dtype=np.int64) // w
        self.occ = np.zeros(wh, dtype=bool)
        midx = pts[:, 1] * w + pts[:, 0]
        self.occ[midx] = True

        # Grid x member pairwise fields.
        dx = np.abs(self._gx[:, None] - pts[None, :, 0])
        dy = np.abs(self._gy[:, None] - pts[None, :, 1])
        g = table[dx, dy]
        self.pair_tot = (g - 1).sum(axis=1)
        gv = g.ravel()
        px = np.repeat(self._gx, self.n)
        py = np.repeat(self._gy, self.n)
        qx = np.tile(pts[:, 0], wh)
        qy = np.tile(pts[:, 1], wh)
        pid, bx, by = _enumerate_between(px, py, qx, qy, gv)
        self.pair_sat = np.zeros(wh, dtype=np.int64)
        if len(pid):
            hit = self.occ[by * w + bx]
            self.pair_sat += np.bincount(pid[hit] // self.n, minlength=wh)

        # Member x member pairs for totals and through counts.
        self.through = np.zeros(wh, dtype=np.int64)
        self.tot = 0
        self.sat = 0
        if self.n >= 2:
            iu, ju = np.triu_indices(self.n, k=1)
            g2 = table[np.abs(pts[iu, 0] - pts[ju, 0]), np.abs(pts[iu, 1] - pts[ju, 1])]
            self.tot = int((g2 - 1).sum())
            pid2, bx2, by2 = _enumerate_between(
                pts[iu, 0], pts[iu, 1], pts[ju, 0], pts[ju, 1], g2
            )
            if len(pid2):
                bidx = by2 * w + bx2
                self.through += np.bincount(bidx, minlength=wh)
                self.sat = int(self.occ[bidx].sum())

    def score(self) -> float:
        return 1.0 if self.tot == 0 else self.sat / self.tot

    def _ray_update(self, c: int, r: int, sign: int) -> None:
        """Apply the between-membership change of cell (c, r) to pair_sat.

        For each member q, every grid cell x on the ray from (c, r) away
        from q gains/loses one satisfied between-point (the cell itself).
        """
        w, h = self.w, self.h
        table = _gcd_table(max(w, h) + 1)
        mem = np.flatnonzero(self.occ)
        mem = mem[mem != r * w + c]
        if len(mem) == 0:
            return
        mx, my = mem % w, mem // w
        dx, dy = c - mx, r - my
        g = table[np.abs(dx), np.abs(dy)]
        ux, uy = dx // g, dy // g
        code = (ux + w) * (2 * h + 1) + (uy + h)
        dirs, counts = np.unique(code, return_counts=True)
        dux = dirs // (2 * h + 1) - w
        duy = dirs % (2 * h + 1) - h
        steps = np.arange(1, max(w, h) + 1, dtype=np.int64)
        x = c + dux[:, None] * steps[None, :]
        y = r + duy[:, None] * steps[None, :]
        ok = (x >= 0) & (x < w) & (y >= 0) & (y < h)
        idx = (y * w + x)[ok]
        wts = np.broadcast_to(counts[:, None], x.shape)[ok]
        np.add.at(self.pair_sat, idx, sign * wts)

    def _pair_updates(self, c: int, r: int, sign: int) -> None:
        w, h = self.w, self.h
        table = _gcd_table(max(w, h) + 1)
        dx = np.abs(self._gx - c)
        dy = np.abs(self._gy - r)
        g = table[dx, dy]
        self.pair_tot += sign * (g - 1)
        # Pairs (x, cell): member between-points counted into pair_sat[x].
        px = self._gx
        py = self._gy
        qx = np.full(len(px), c, dtype=np.int64)
        qy = np.full(len(py), r, dtype=np.int64)
        pid, bx, by = _enumerate_between(px, py, qx, qy, g)
        if len(pid):
            hit = self.occ[by * w + bx]
            self.pair_sat += sign * np.bincount(pid[hit], minlength=w * h)
        self._ray_update(c, r, sign)
        # Member pairs {cell, q}: through counts at their between-points.
        mem = np.flatnonzero(self.occ)
        mem = mem[mem != r * w + c]
        if len(mem):
            mx, my = mem % w, mem // w
            g2 = table[np.abs(mx - c), np.abs(my - r)]
            pid2, bx2, by2 = _enumerate_between(
                np.full(len(mem), c, dtype=np.int64),
                np.full(len(mem), r, dtype=np.int64),
                mx,
                my,
                g2,
            )
            if len(pid2):
                self.through += sign * np.bincount(by2 * w + bx2, minlength=w * h)

    def remove(self, cell: Cell) -> None:
        c, r = cell
        ci = r * self.w + c
        if not self.occ[ci]:
            raise ValueError(f"cell {cell} is not a member")
        self.tot -= int(self.pair_tot[ci])
        self.sat -= int(self.pair_sat[ci]) + int(self.through[ci])
        self.occ[ci] = False
        self.n -= 1
        self._pair_updates(c, r, -1)

    def add(self, cell: Cell) -> None:
        c, r = cell
        ci = r * self.w + c
        if self.occ[ci]:
            raise ValueError(f"cell {cell} is already a member")
        self.tot += int(self.pair_tot[ci])
        self.sat += int(self.pair_sat[ci]) + int(self.through[ci])
        self._pair_updates(c, r, +1)
        self.occ[ci] = True
        self.n += 1


def _hull_chain(points: Iterable[tuple[int, int]]):
    """Monotone-chain hull of integer points: (vertices, perimeter, area)."""
    pts = sorted(set(points))
    if len(pts) < 3:
        raise ValueError("degenerate hull input")

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    verts = lower[:-1] + upper[:-1]
    perim = 0.0
    area2 = 0
    m = len(verts)
    for i in range(m):
        x1, y1 = verts[i]
        x2, y2 = verts[(i + 1) % m]
        perim += math.hypot(x2 - x1, y2 - y1)
        area2 += x1 * y2 - x2 * y1
    return verts, perim, area2 / 2


def cell_corner_points(cells: Iterable[Cell]) -> list[tuple[int, int]]:
    corners = set()
    for c, r in cells:
        corners.update(((c, r), (c + 1, r), (c, r + 1), (c + 1, r + 1)))
    return list(corners)


class HullField:
    """Hull and boundary-length bookkeeping for one cluster.

    `edge_count` is the number of unit boundary edges (4n minus twice the
    4-adjacency count); the hull is rebuilt lazily from per-row column
    extremes, which is O(height) for blob-like clusters.
    """

    __slots__ = ("w", "h", "occ2", "n", "edge_count", "_hull")

    def __init__(self, w: int, h: int, cells: Iterable[Cell]):
        self.w, self.h = w, h
        self.occ2 = np.zeros((h, w), dtype=bool)
        pts = sorted(cells)
        if not pts:
            raise ValueError("cluster must be nonempty")
        for c, r in pts:
            self.occ2[r, c] = True
        self.n = len(pts)
        adj = int(
            (self.occ2[:, :-1] & self.occ2[:, 1:]).sum()
            + (self.occ2[:-1, :] & self.occ2[1:, :]).sum()
        )
        self.edge_count = 4 * self.n - 2 * adj
        self._hull = None

    def _extreme_points(self, drop: Cell | None = None, extra: Cell | None = None):
        pts = []
        for r in range(self.h):
            row = np.flatnonzero(self.occ2[r])
            cols = set(int(c) for c in row)
            if drop is not None and drop[1] == r:
                cols.discard(drop[0])
            if extra is not None and extra[1] == r:
                cols.add(extra[0])
            if not cols:
                continue
            lo, hi = min(cols), max(cols)
            pts.extend(((lo, r), (lo, r + 1), (hi + 1, r), (hi + 1, r + 1)))
        return pts

    def hull(self):
        """(vertices, perimeter, area, critical cells) of the current hull."""
        if self._hull is None:
            verts, perim, area = _hull_chain(self._extreme_points())
            critical = set()
            vset = set(verts)
            for x, y in vset:
                for cc, rr in ((x, y), (x - 1, y), (x, y - 1), (x - 1, y - 1)):
                    if 0 <= cc < self.w and 0 <= rr < self.h and self.occ2[rr, cc]:
                        critical.add((cc, rr))
            self._hull = (verts, perim, area, critical)
        return self._hull

    def hull_without(self, drop: Cell, extra: Cell | None = None):
        """Hull of the cluster with one cell dropped (and optionally one added)."""
        verts, perim, area, critical = self.hull()
        if drop not in critical and extra is None:
            return verts, perim, area
        if drop not in critical:
            v, p, a = _hull_chain(
                verts + [(extra[0], extra[1]), (extra[0] + 1, extra[1]),
                         (extra[0], extra[1] + 1), (extra[0] + 1, extra[1] + 1)]
            )
            return v, p, a
        return _hull_chain(self._extreme_points(drop=drop, extra=extra))

    def nb4(self, cell: Cell) -> int:
        c, r = cell
        count = 0
        if c > 0 and self.occ2[r, c - 1]:
            count += 1
        if c + 1 < self.w and self.occ2[r, c + 1]:
            count += 1
        if r > 0 and self.occ2[r - 1, c]:
            count += 1
        if r + 1 < self.h and self.occ2[r + 1, c]:
            count += 1
        return count

    def remove(self, cell: Cell) -> None:
        c, r = cell
        if not self.occ2[r, c]:
            raise ValueError(f"cell {cell} is not a member")
        self.occ2[r, c] = False
        self.edge_count += -4 + 2 * self.nb4(cell)
        self.n -= 1
        self._hull = None

    def add(self, cell: Cell) -> None:
        c, r = cell
        if self.occ2[r, c]:
            raise ValueError(f"cell {cell} is already a member")
        self.edge_count += 4 - 2 * self.nb4(cell)
        self.occ2[r, c] = True
        self.n += 1
        self._hull = None


def hull_scores(n: int, perim: float, area: float, edge_count: int, measure: str):
    if measure == "perimeter":
        return perim / edge_count if perim <= edge_count else edge_count / perim
    return min(1.0, n / area)
