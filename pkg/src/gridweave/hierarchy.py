"""Sampling-based hierarchy: representative layouts at the top, zoomable children.

Large sample sets are shown through representatives chosen per cluster in
proportion to cluster size; hidden samples attach to their nearest
representative in the projection.  Zooming re-lays-out a selected sub-region,
feeding the carried representatives' previous cells in as anchored input
positions so relative placement survives the zoom.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .assign import LambdaSchedule, baseline_grid_from_projection, global_assignment
from .measures import Measure
from .model import GridLayout, GridSpec, LayoutError, Sample, SampleSet, validate_layout
from .refine import local_adjust

# Builds (layout, anchored input layout) for a node's representative samples.
LayoutFn = Callable[[SampleSet, GridSpec, int], tuple[GridLayout, GridLayout]]


def default_layout_fn(samples: SampleSet, spec: GridSpec, seed: int):
    base = baseline_grid_from_projection(samples, spec)
    out = global_assignment(base, LambdaSchedule.adaptive())
    out = local_adjust(out, Measure.TRIPLE, seed=seed, input_layout=base)
    return out, base


@dataclass(frozen=True)
class HierarchyNode:
    """One zoom level: representatives on a grid plus their hidden samples."""

    id: str
    representative_ids: tuple[str, ...]
    assigned: Mapping[str, tuple[str, ...]]
    layout: GridLayout
    input_layout: GridLayout
    parent: Optional[str] = None
    anchor_positions: Mapping[str, tuple[float, float]] = field(default_factory=dict)
    universe: Optional[SampleSet] = None

    def sample_count(self) -> int:
        return len(self.representative_ids) + sum(len(v) for v in self.assigned.values())


def _proportional_quota(sizes: Sequence[int], capacity: int) -> list[int]:
    """Seats per cluster: one guaranteed each, the rest by highest averages."""
    k = len(sizes)
    if capacity < k:
        raise LayoutError(f"capacity {capacity} below cluster count {k}")
    quota = [1] * k
    for _ in range(min(capacity, sum(sizes)) - k):
        best = -1
        best_key = None
        for i in range(k):
            if quota[i] >= sizes[i]:
                continue
            key = (sizes[i] / (quota[i] + 1), sizes[i], -i)
            if best_key is None or key > best_key:
                best_key = key
                best = i
        if best < 0:
            break
        quota[best] += 1
    return quota


def _nearest_assignment(
    rep_ids: Sequence[str], hidden: Sequence[Sample], by_id: Mapping[str, Sample]
) -> dict[str, list[str]]:
    assigned: dict[str, list[str]] = {rid: [] for rid in rep_ids}
    if hidden:
        rep_pos = np.array([by_id[rid].position for rid in rep_ids])
        hid_pos = np.array([s.position for s in hidden])
        d = ((hid_pos[:, None, :] - rep_pos[None, :, :]) ** 2).sum(axis=2)
        nearest = d.argmin(axis=1)
        for s, j in zip(hidden, nearest):
            assigned[rep_ids[int(j)]].append(s.id)
    return assigned


def build_root(
    samples: SampleSet,
    spec: GridSpec,
    seed: int,
    layout_fn: Optional[LayoutFn] = None,
) -> HierarchyNode:
    """Top-level node: stratified representatives laid out by the full pipeline.

    When everything fits, all samples are representatives.  Otherwise each
    nonempty cluster gets representatives in proportion to its size (at least
    one), chosen with the seeded RNG, and the remaining samples attach to
    their nearest representative in the projection.
    """
    if len(samples) == 0:
        raise LayoutError("sample set is empty")
    layout_fn = layout_fn or default_layout_fn
    rng = np.random.default_rng(seed)
    n = len(samples)
    if n <= spec.capacity:
        rep_idx = list(range(n))
    else:
        clusters: dict[str, list[int]] = {}
        for i, s in enumerate(samples.samples):
            clusters.setdefault(s.cluster, []).append(i)
        names = sorted(clusters)
        quota = _proportional_quota([len(clusters[c]) for c in names], spec.capacity)
        rep_idx = []
        for name, q in zip(names, quota):
            members = clusters[name]
            pick = rng.choice(len(members), size=q, replace=False)
            rep_idx.extend(members[int(p)] for p in pick)
        rep_idx.sort()
    rep_samples = SampleSet(tuple(samples.samples[i] for i in rep_idx))
    rep_ids = tuple(s.id for s in rep_samples.samples)
    rep_set = set(rep_idx)
    hidden = [s for i, s in enumerate(samples.samples) if i not in rep_set]
    assigned = _nearest_assignment(rep_ids, hidden, {s.id: s for s in samples.samples})
    layout, input_layout = layout_fn(rep_samples, spec, seed)
    check = validate_layout(layout)
    if not check.ok:
        raise LayoutError("pipeline produced invalid layout: " + check.violations[0])
    return HierarchyNode(
        id="root",
        representative_ids=rep_ids,
        assigned={k: tuple(v) for k, v in assigned.items()},
        layout=layout,
        input_layout=input_layout,
        universe=samples,
    )


def zoom(
    node: HierarchyNode,
    selected_cells: Sequence[tuple[int, int]],
    spec: GridSpec,
    seed: int,
    layout_fn: Optional[LayoutFn] = None,
    node_id: Optional[str] = None,
) -> HierarchyNode:
    """Child node for a selected sub-region of a node's layout.

    The pool is the selected representatives plus their assigned samples; the
    child keeps every selected representative and fills the grid with their
    assigned samples in proportion to assignment size.  Carried
    representatives enter the child pipeline at their previous cells rescaled
    into the child grid, so the layout is only softly anchored.
    """
    if not selected_cells:
        raise LayoutError("selection is empty")
    layout_fn = layout_fn or default_layout_fn
    rng = np.random.default_rng(seed)
    parent_spec = node.layout.spec
    sample_of = node.layout.assignment.sample_of
    sel_cells = sorted({(int(c), int(r)) for c, r in selected_cells})
    sel_rep_idx = []
    for c, r in sel_cells:
        if not (0 <= c < parent_spec.width and 0 <= r < parent_spec.height):
            raise LayoutError(f"selected cell ({c}, {r}) outside the grid")
        si = sample_of[parent_spec.cell_index(c, r)]
        if si is None:
            raise LayoutError(f"selected cell ({c}, {r}) is empty")
        sel_rep_idx.append(si)

    universe = node.universe or node.layout.samples
    by_id = {s.id: s for s in universe.samples}
    sel_rep_ids = [node.layout.samples.samples[i].id for i in sel_rep_idx]
    pool_hidden: dict[str, list[str]] = {
        rid: list(node.assigned.get(rid, ())) for rid in sel_rep_ids
    }

    capacity = spec.capacity
    extra = capacity - len(sel_rep_ids)
    child_ids = list(sel_rep_ids)
    if extra > 0:
        sizes = [len(pool_hidden[rid]) for rid in sel_rep_ids]
        if any(sizes):
            quota = _fill_quota(sizes, extra)
            for rid, q in zip(sel_rep_ids, quota):
                ids = pool_hidden[rid]
                if q > 0 and ids:
                    pick = rng.choice(len(ids), size=min(q, len(ids)), replace=False)
                    child_ids.extend(ids[int(p)] for p in sorted(pick))

    # Anchor carried representatives: previous cells rescaled to the child grid.
    minc = min(c for c, _ in sel_cells)
    maxc = max(c for c, _ in sel_cells) + 1
    minr = min(r for _, r in sel_cells)
    maxr = max(r for _, r in sel_cells) + 1
    anchors: dict[str, tuple[float, float]] = {}
    for (c, r), rid in zip(sel_cells, sel_rep_ids):
        ax = (c + 0.5 - minc) / (maxc - minc) * spec.width
        ay = (r + 0.5 - minr) / (maxr - minr) * spec.height
        anchors[rid] = (ax, ay)

    # Offsets of hidden samples relative to their representative, rescaled to
    # roughly cell units so the baseline assignment keeps local structure.
    pool_samples = [by_id[sid] for sid in child_ids]
    pos = np.array([s.position for s in pool_samples])
    span = max(pos[:, 0].max() - pos[:, 0].min(), pos[:, 1].max() - pos[:, 1].min(), 1e-9)
    kappa = min(spec.width, spec.height) / span
    rep_of: dict[str, str] = {}
    for rid in sel_rep_ids:
        rep_of[rid] = rid
        for sid in pool_hidden[rid]:
            rep_of[sid] = rid
    child_samples = []
    for s in pool_samples:
        rep = by_id[rep_of[s.id]]
        ax, ay = anchors[rep.id]
        px = ax + (s.position[0] - rep.position[0]) * kappa
        py = ay + (s.position[1] - rep.position[1]) * kappa
        child_samples.append(Sample(s.id, (px, py), s.cluster, s.meta))
    child_set = SampleSet(tuple(child_samples))

    layout, input_layout = layout_fn(child_set, spec, seed)
    check = validate_layout(layout)
    if not check.ok:
        raise LayoutError("pipeline produced invalid layout: " + check.violations[0])
    child_rep_ids = tuple(s.id for s in child_set.samples)
    shown = set(child_ids)
    remaining = [
        by_id[sid]
        for rid in sel_rep_ids
        for sid in pool_hidden[rid]
        if sid not in shown
    ]
    assigned = _nearest_assignment(child_rep_ids, remaining, by_id)
    return HierarchyNode(
        id=node_id or f"{node.id}/zoom",
        representative_ids=child_rep_ids,
        assigned={k: tuple(v) for k, v in assigned.items()},
        layout=layout,
        input_layout=input_layout,
        parent=node.id,
        anchor_positions=anchors,
        universe=universe,
    )


def _fill_quota(sizes: Sequence[int], capacity: int) -> list[int]:
    """Seats proportional to sizes with per-entry caps; zero-size entries get none."""
    quota = [0] * len(sizes)
    for _ in range(min(capacity, sum(sizes))):
        best = -1
        best_key = None
        for i, size in enumerate(sizes):
            if quota[i] >= size:
                continue
            key = (size / (quota[i] + 1), size, -i)
            if best_key is None or key > best_key:
                best_key = key
                best = i
        if best < 0:
            break
        quota[best] += 1
    return quota
