"""Domain types shared by every stage: samples, grids, assignments, cluster shapes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .geometry import Polygon, signed_area

Cell = tuple[int, int]

# Marker for unassigned cells in label/sample tables.
EMPTY = None


class LayoutError(ValueError):
    """Raised when a layout or its inputs violate a structural contract."""


@dataclass(frozen=True)
class Sample:
    id: str
    position: tuple[float, float]
    cluster: str
    meta: Optional[Mapping[str, str]] = None


@dataclass(frozen=True)
class SampleSet:
    """Samples with 2D projected positions, cluster labels, optional similarities.

    `similarities`, when present, is a dense symmetric matrix with unit
    diagonal and entries in [0, 1], indexed like `samples`.
    """

    samples: tuple[Sample, ...]
    similarities: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        ids = [s.id for s in self.samples]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise LayoutError(f"duplicate sample ids: {dupes[:5]}")
        for s in self.samples:
            x, y = s.position
            if not (np.isfinite(x) and np.isfinite(y)):
                raise LayoutError(f"non-finite position for sample {s.id!r}")
        if self.similarities is not None:
            sims = np.asarray(self.similarities, dtype=float)
            n = len(self.samples)
            if sims.shape != (n, n):
                raise LayoutError(
                    f"similarity matrix shape {sims.shape} does not match {n} samples"
                )
            if not np.allclose(sims, sims.T, atol=1e-9):
                raise LayoutError("similarity matrix is not symmetric")
            if not np.allclose(np.diag(sims), 1.0, atol=1e-9):
                raise LayoutError("similarity matrix diagonal must be 1")
            if sims.min() < 0 or sims.max() > 1 + 1e-12:
                raise LayoutError("similarities must lie in [0, 1]")
            sims.flags.writeable = False
            object.__setattr__(self, "similarities", sims)

    def __len__(self) -> int:
        return len(self.samples)

    def positions(self) -> np.ndarray:
        return np.array([s.position for s in self.samples], dtype=float)

    def clusters(self) -> list[str]:
        return [s.cluster for s in self.samples]

    def index_of(self) -> dict[str, int]:
        return {s.id: i for i, s in enumerate(self.samples)}


@dataclass(frozen=True)
class GridSpec:
    """Grid dimensions in cells; cell (c, r) has center (c + 0.5, r + 0.5)."""

    width: int
    height: int

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise LayoutError("grid dimensions must be at least 1x1")

    @property
    def capacity(self) -> int:
        return self.width * self.height

    @property
    def diag_sq(self) -> float:
        return float(self.width**2 + self.height**2)

    def cell_index(self, col: int, row: int) -> int:
        return row * self.width + col

    def cell_of_index(self, idx: int) -> Cell:
        return idx % self.width, idx // self.width

    def center(self, idx: int) -> tuple[float, float]:
        c, r = self.cell_of_index(idx)
        return c + 0.5, r + 0.5

    def centers(self) -> np.ndarray:
        """All cell centers, indexed row-major like cell indices."""
        cols = np.arange(self.capacity) % self.width
        rows = np.arange(self.capacity) // self.width
        return np.stack([cols + 0.5, rows + 0.5], axis=1)


@dataclass(frozen=True)
class Assignment:
    """Sample-to-cell mapping, intended to be injective.

    Construction is lenient so that broken assignments can be inspected;
    `validate_layout` reports any bijection violations.
    """

    grid: GridSpec
    cell_of: tuple[int, ...]

    @property
    def sample_of(self) -> tuple[Optional[int], ...]:
        table: list[Optional[int]] = [EMPTY] * self.grid.capacity
        for i, cell in enumerate(self.cell_of):
            if 0 <= cell < self.grid.capacity:
                table[cell] = i
        return tuple(table)

    def __len__(self) -> int:
        return len(self.cell_of)


def _labels_from(samples: SampleSet, assignment: Assignment) -> tuple[Optional[str], ...]:
    table: list[Optional[str]] = [EMPTY] * assignment.grid.capacity
    for i, cell in enumerate(assignment.cell_of):
        if 0 <= cell < assignment.grid.capacity:
            table[cell] = samples.samples[i].cluster
    return tuple(table)


@dataclass(frozen=True)
class GridLayout:
    """A grid spec plus the sample-to-cell assignment and per-cell cluster labels."""

    samples: SampleSet
    spec: GridSpec
    assignment: Assignment
    labels: tuple[Optional[str], ...] = field(default=())

    def __post_init__(self) -> None:
        if not self.labels:
            object.__setattr__(self, "labels", _labels_from(self.samples, self.assignment))

    @classmethod
    def from_cells(cls, samples: SampleSet, spec: GridSpec, cell_of: Sequence[int]) -> "GridLayout":
        return cls(samples, spec, Assignment(spec, tuple(int(c) for c in cell_of)))

    def cell_of_sample(self, i: int) -> int:
        return self.assignment.cell_of[i]

    def sample_positions(self) -> np.ndarray:
        """Cell centers of each sample, in cell units."""
        idx = np.asarray(self.assignment.cell_of)
        cols = idx % self.spec.width
        rows = idx // self.spec.width
        return np.stack([cols + 0.5, rows + 0.5], axis=1)

    def label_grid(self) -> list[list[Optional[str]]]:
        w = self.spec.width
        return [list(self.labels[r * w : (r + 1) * w]) for r in range(self.spec.height)]

    def cluster_cells(self) -> dict[str, set[Cell]]:
        """Cells occupied by each cluster, keyed by cluster id."""
        out: dict[str, set[Cell]] = {}
        for i, cell in enumerate(self.assignment.cell_of):
            out.setdefault(self.samples.samples[i].cluster, set()).add(
                self.spec.cell_of_index(cell)
            )
        return out


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...]


def validate_layout(layout: GridLayout) -> ValidationReport:
    """Report bijection violations, label mismatches, and range errors."""
    violations: list[str] = []
    spec = layout.spec
    if layout.assignment.grid != spec:
        violations.append("assignment grid differs from layout grid")
    n = len(layout.samples)
    if len(layout.assignment.cell_of) != n:
        violations.append(
            f"assignment covers {len(layout.assignment.cell_of)} samples, sample set has {n}"
        )
    seen: dict[int, int] = {}
    for i, cell in enumerate(layout.assignment.cell_of):
        if not 0 <= cell < spec.capacity:
            violations.append(f"sample {i} assigned to out-of-range cell {cell}")
            continue
        if cell in seen:
            violations.append(f"duplicate cell: cell {cell} holds samples {seen[cell]} and {i}")
        seen[cell] = i
    if len(layout.labels) != spec.capacity:
        violations.append("label table size differs from grid capacity")
    else:
        for cell in range(spec.capacity):
            expected = EMPTY
            if cell in seen:
                expected = layout.samples.samples[seen[cell]].cluster
            if layout.labels[cell] != expected:
                violations.append(
                    f"label mismatch at cell {cell}: {layout.labels[cell]!r} != {expected!r}"
                )
    return ValidationReport(not violations, tuple(violations))


@dataclass(frozen=True)
class ClusterShape:
    """Cells of one cluster plus the rectilinear boundary rings of their union.

    Outer rings are counterclockwise (positive signed area), holes clockwise;
    the signed areas of all rings sum to the cell count.
    """

    cluster: str
    cells: frozenset[Cell]
    boundary: tuple[Polygon, ...]

    def __post_init__(self) -> None:
        if not self.cells:
            raise LayoutError("cluster shape must have at least one cell")


def _boundary_edges(cells: set[Cell]) -> dict[Cell, list[Cell]]:
    """Directed boundary edges of the cell union, interior on the left."""
    edges: dict[Cell, list[Cell]] = {}
    for c, r in cells:
        if (c, r - 1) not in cells:
            edges.setdefault((c, r), []).append((c + 1, r))
        if (c + 1, r) not in cells:
            edges.setdefault((c + 1, r), []).append((c + 1, r + 1))
        if (c, r + 1) not in cells:
            edges.setdefault((c + 1, r + 1), []).append((c, r + 1))
        if (c - 1, r) not in cells:
            edges.setdefault((c, r + 1), []).append((c, r))
    return edges


def trace_boundary(cells: Iterable[Cell]) -> tuple[Polygon, ...]:
    """Trace the rectilinear boundary rings of a union of unit cells.

    Where four boundary edges meet at a checkerboard corner, the leftmost
    turn is taken, which keeps diagonally-touching cells in separate rings
    (4-connectivity).  Collinear runs are merged into single polygon edges.
    """
    cellset = set(cells)
    edges = _boundary_edges(cellset)
    remaining = {start: sorted(ends) for start, ends in edges.items()}
    rings: list[Polygon] = []
    starts = sorted(remaining)
    for start in starts:
        while remaining.get(start):
            path = [start]
            prev_dir: Optional[Cell] = None
            cur = start
            while True:
                options = remaining[cur]
                if prev_dir is None or len(options) == 1:
                    nxt = options.pop(0)
                else:
                    # Leftmost turn relative to the incoming direction.
                    dx, dy = prev_dir
                    left = (cur[0] - dy, cur[1] + dx)
                    nxt = left if left in options else options[0]
                    options.remove(nxt)
                if not options:
                    del remaining[cur]
                prev_dir = (nxt[0] - cur[0], nxt[1] - cur[1])
                cur = nxt
                if cur == path[0]:
                    break
                path.append(cur)
            rings.append(Polygon(tuple(_merge_collinear(path))))
    rings.sort(key=lambda p: (-p.signed_area, p.vertices))
    return tuple(rings)


def _merge_collinear(path: list[Cell]) -> list[Cell]:
    out: list[Cell] = []
    n = len(path)
    for i in range(n):
        prev = path[i - 1]
        cur = path[i]
        nxt = path[(i + 1) % n]
        if (cur[0] - prev[0]) * (nxt[1] - cur[1]) != (cur[1] - prev[1]) * (nxt[0] - cur[0]):
            out.append(cur)
    # Rotate so the ring starts at its lexicographically smallest vertex.
    k = out.index(min(out))
    return out[k:] + out[:k]


def extract_cluster_shapes(layout: GridLayout) -> list[ClusterShape]:
    """One ClusterShape per distinct cluster id, in sorted cluster-id order.

    Disconnected clusters yield one shape with multiple boundary rings.
    """
    check = validate_layout(layout)
    if not check.ok:
        raise LayoutError("invalid layout: " + "; ".join(check.violations[:3]))
    shapes = []
    for cluster, cells in sorted(layout.cluster_cells().items()):
        rings = trace_boundary(cells)
        shape = ClusterShape(cluster, frozenset(cells), rings)
        total = sum(p.signed_area for p in rings)
        if total != len(cells):
            raise LayoutError(
                f"boundary area {total} does not match cell count {len(cells)}"
            )
        shapes.append(shape)
    return shapes
