"""Layout quality measures: proximity, compactness, and four convexity scores."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

import numpy as np

from .geometry import (
    collinear_triple_counts,
    hull_of_cells,
    polygon_area,
    polygon_perimeter,
)
from .model import Cell, ClusterShape, GridLayout, LayoutError


class Measure(Enum):
    """The four selected convexity measures."""

    AREA = "area"
    TRIPLE = "triple"
    PERIMETER = "perimeter"
    CUT = "cut"


@dataclass(frozen=True)
class MeasureReport:
    """Six normalized quality scores of a layout, all in (0, 1]."""

    proximity: float
    compactness: float
    area_ratio: float
    triple_ratio: float
    perimeter_ratio: float
    cut_ratio: float
    raw_prox2: float
    raw_comp: float

    def as_dict(self) -> dict:
        return {
            "proximity": self.proximity,
            "compactness": self.compactness,
            "area_ratio": self.area_ratio,
            "triple_ratio": self.triple_ratio,
            "perimeter_ratio": self.perimeter_ratio,
            "cut_ratio": self.cut_ratio,
            "raw": {"prox2": self.raw_prox2, "comp": self.raw_comp},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MeasureReport":
        return cls(
            proximity=d["proximity"],
            compactness=d["compactness"],
            area_ratio=d["area_ratio"],
            triple_ratio=d["triple_ratio"],
            perimeter_ratio=d["perimeter_ratio"],
            cut_ratio=d["cut_ratio"],
            raw_prox2=d["raw"]["prox2"],
            raw_comp=d["raw"]["comp"],
        )


def _cell_arrays(cells: Iterable[Cell]):
    pts = np.asarray(sorted(set(cells)), dtype=np.int64)
    if pts.size == 0:
        raise LayoutError("cell set must be nonempty")
    cc = pts[:, 0] - pts[:, 0].min()
    rr = pts[:, 1] - pts[:, 1].min()
    occ = np.zeros((rr.max() + 3, cc.max() + 3), dtype=bool)
    occ[rr + 1, cc + 1] = True
    return pts, cc, rr, occ


def boundary_edge_count(cells: Iterable[Cell]) -> int:
    """Number of unit edges on the boundary of the cell union (all rings)."""
    _, cc, rr, occ = _cell_arrays(cells)
    n = len(cc)
    adj = int(occ[rr + 1, cc + 2].sum() + occ[rr + 2, cc + 1].sum())
    return 4 * n - 2 * adj


def cut_ratio_cells(cells: Iterable[Cell]) -> float:
    """Mean interior-side area fraction over all unit boundary edges.

    Boundary edges lie on integer lines, so each cell falls entirely on one
    side and every fraction is an exact cell-count ratio.
    """
    _, cc, rr, occ = _cell_arrays(cells)
    n = len(cc)
    col_cum = np.concatenate(([0], np.cumsum(np.bincount(cc))))  # cells with col < c
    row_cum = np.concatenate(([0], np.cumsum(np.bincount(rr))))
    up = ~occ[rr + 2, cc + 1]
    down = ~occ[rr, cc + 1]
    right = ~occ[rr + 1, cc + 2]
    left = ~occ[rr + 1, cc]
    edges = int(up.sum() + down.sum() + right.sum() + left.sum())
    acc = int(row_cum[rr[up] + 1].sum())          # interior y <= r+1: rows <= r
    acc += int((n - row_cum[rr[down]]).sum())     # interior y >= r: rows >= r
    acc += int(col_cum[cc[right] + 1].sum())      # interior x <= c+1: cols <= c
    acc += int((n - col_cum[cc[left]]).sum())     # interior x >= c: cols >= c
    return acc / (edges * n)


def score_cells(cells: Iterable[Cell], measure: Measure) -> float:
    """Convexity score of a cell union under one measure."""
    cells = set(cells)
    n = len(cells)
    if n == 0:
        raise LayoutError("cell set must be nonempty")
    if measure is Measure.AREA:
        return min(1.0, n / polygon_area(hull_of_cells(cells)))
    if measure is Measure.TRIPLE:
        tc = collinear_triple_counts(cells)
        return 1.0 if tc.total == 0 else tc.satisfied / tc.total
    if measure is Measure.PERIMETER:
        hull_perim = polygon_perimeter(hull_of_cells(cells))
        edges = boundary_edge_count(cells)
        # Fragmented shapes can have a hull longer than the summed ring
        # boundaries; the inverted ratio keeps the score in (0, 1] and
        # penalizes the fragmentation instead of hiding it.
        return hull_perim / edges if hull_perim <= edges else edges / hull_perim
    if measure is Measure.CUT:
        return cut_ratio_cells(cells)
    raise ValueError(f"unknown measure {measure!r}")


def convexity(shape: ClusterShape, measure: Measure) -> float:
    return score_cells(shape.cells, measure)


def layout_convexity(layout: GridLayout, measure: Measure) -> float:
    """Unweighted mean convexity score over the layout's clusters."""
    groups = layout.cluster_cells()
    if not groups:
        raise LayoutError("layout has no clusters")
    return sum(score_cells(cells, measure) for _, cells in sorted(groups.items())) / len(groups)


def _require_compatible(layout: GridLayout, reference: GridLayout) -> None:
    if layout.spec != reference.spec:
        raise LayoutError("layouts use different grids")
    a = [s.id for s in layout.samples.samples]
    b = [s.id for s in reference.samples.samples]
    if a != b:
        raise LayoutError("layouts cover different sample sets")


def proximity_raw(layout: GridLayout, input_layout: GridLayout) -> float:
    """Total squared cell-center displacement from the input layout."""
    _require_compatible(layout, input_layout)
    d = layout.sample_positions() - input_layout.sample_positions()
    return float((d * d).sum())


def proximity_similarity(layout: GridLayout, sims: Optional[np.ndarray] = None) -> float:
    """Similarity-based proximity: sum of (w*dist - (1 - c_ij))^2 over all pairs.

    The scale w = 1/(grid diagonal) keeps the distance term in [0, 1].
    """
    if sims is None:
        sims = layout.samples.similarities
    if sims is None:
        raise LayoutError("no similarity matrix available")
    sims = np.asarray(sims, dtype=float)
    n = len(layout.samples)
    if sims.shape != (n, n):
        raise LayoutError(f"similarity matrix shape {sims.shape} does not match {n} samples")
    pos = layout.sample_positions()
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    w = 1.0 / math.sqrt(layout.spec.diag_sq)
    term = w * dist - (1.0 - sims)
    return float((term * term).sum())


def compactness_raw(layout: GridLayout) -> float:
    """Total squared distance of samples to their cluster's mean cell position."""
    pos = layout.sample_positions()
    clusters = np.asarray(layout.samples.clusters())
    total = 0.0
    for cluster in np.unique(clusters):
        p = pos[clusters == cluster]
        mu = p.mean(axis=0)
        d = p - mu
        total += float((d * d).sum())
    return total


def report(layout: GridLayout, input_layout: GridLayout) -> MeasureReport:
    """Assemble the six-score report; proximity/compactness via exp(-x/(n*D^2))."""
    _require_compatible(layout, input_layout)
    prox2 = proximity_raw(layout, input_layout)
    comp = compactness_raw(layout)
    denom = len(layout.samples) * layout.spec.diag_sq
    return MeasureReport(
        proximity=math.exp(-prox2 / denom),
        compactness=math.exp(-comp / denom),
        area_ratio=layout_convexity(layout, Measure.AREA),
        triple_ratio=layout_convexity(layout, Measure.TRIPLE),
        perimeter_ratio=layout_convexity(layout, Measure.PERIMETER),
        cut_ratio=layout_convexity(layout, Measure.CUT),
        raw_prox2=prox2,
        raw_comp=comp,
    )
