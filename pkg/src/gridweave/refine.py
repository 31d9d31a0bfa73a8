"""Local adjustment: greedy boundary-cell swaps that raise a convexity measure."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._swapeval import HullField, TripleField, _enumerate_between, _gcd_table, _hull_chain, hull_scores
from .measures import Measure, cut_ratio_cells, score_cells
from .model import GridLayout, LayoutError, validate_layout

GAIN_THRESHOLD = 1e-12
_NEIGHBORS8 = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)]


@dataclass(frozen=True)
class SwapCandidate:
    cell_a: int
    cell_b: int
    gain: float
    prox_penalty: float


@dataclass
class LocalStats:
    """Per-run record of the swap phase; audit rows are (pass, a, b, before, after)."""

    passes: int = 0
    accepted: int = 0
    audit: list = field(default_factory=list)


def boundary_cells(layout: GridLayout) -> set[int]:
    """Cells whose 3x3 neighborhood contains a different non-empty cluster."""
    w, h = layout.spec.width, layout.spec.height
    ids = sorted({lab for lab in layout.labels if lab is not None})
    code = {lab: i for i, lab in enumerate(ids)}
    lab = np.full((h + 2, w + 2), -1, dtype=np.int32)
    for ci, cluster in enumerate(layout.labels):
        if cluster is not None:
            lab[ci // w + 1, ci % w + 1] = code[cluster]
    center = lab[1:-1, 1:-1]
    differs = np.zeros((h, w), dtype=bool)
    for dc, dr in _NEIGHBORS8:
        nb = lab[1 + dr : h + 1 + dr, 1 + dc : w + 1 + dc]
        differs |= (nb != -1) & (nb != center)
    differs &= center != -1
    rows, cols = np.nonzero(differs)
    return set((rows * w + cols).tolist())


class _LocalState:
    """Mutable working state of one swap phase."""

    def __init__(self, layout: GridLayout, measure: Measure, reference: GridLayout):
        self.spec = layout.spec
        self.w, self.h = self.spec.width, self.spec.height
        self.measure = measure
        self.samples = layout.samples
        self.cluster_ids = sorted({s.cluster for s in layout.samples.samples})
        self.K = len(self.cluster_ids)
        code = {cid: k for k, cid in enumerate(self.cluster_ids)}
        wh = self.w * self.h
        self.label = np.full(wh, -1, dtype=np.int32)
        self.sample_at = np.full(wh, -1, dtype=np.int64)
        self.cell_of = np.asarray(layout.assignment.cell_of, dtype=np.int64).copy()
        for i, ci in enumerate(self.cell_of):
            self.label[ci] = code[layout.samples.samples[i].cluster]
            self.sample_at[ci] = i
        self.cells: list[set] = [set() for _ in range(self.K)]
        for ci in np.flatnonzero(self.label >= 0):
            self.cells[self.label[ci]].add((int(ci) % self.w, int(ci) // self.w))
        self.fields: list = [None] * self.K
        self.scores = np.array([self._fresh_score(k) for k in range(self.K)])
        self.boundary = boundary_cells(layout)
        self.ref_pos = reference.sample_positions()
        self.grid_centers = self.spec.centers()

    def field(self, k: int):
        if self.fields[k] is None:
            if self.measure is Measure.TRIPLE:
                self.fields[k] = TripleField(self.w, self.h, self.cells[k])
            elif self.measure in (Measure.PERIMETER, Measure.AREA):
                self.fields[k] = HullField(self.w, self.h, self.cells[k])
        return self.fields[k]

    def _fresh_score(self, k: int) -> float:
        if self.measure is Measure.TRIPLE and self.fields[k] is not None:
            return self.fields[k].score()
        if self.measure in (Measure.PERIMETER, Measure.AREA) and self.fields[k] is not None:
            f = self.fields[k]
            _, perim, area, _ = f.hull()
            return hull_scores(f.n, perim, area, f.edge_count, self.measure.value)
        return score_cells(self.cells[k], self.measure)

    def mean_score(self) -> float:
        return float(self.scores.mean())

    def candidates_for(self, a_ci: int) -> np.ndarray:
        """Other-cluster boundary cells in the 3x3 neighborhood of a cell.

        Distant partners are excluded: a cross-grid swap strands both swapped
        samples as satellites, which stretches the hulls and games the
        boundary measures while wrecking proximity.
        """
        ak = self.label[a_ci]
        c, r = a_ci % self.w, a_ci // self.w
        out = []
        for dc, dr in _NEIGHBORS8:
            cc, rr = c + dc, r + dr
            if 0 <= cc < self.w and 0 <= rr < self.h:
                ci = rr * self.w + cc
                if ci in self.boundary and self.label[ci] != ak:
                    out.append(ci)
        out.sort()
        return np.asarray(out, dtype=np.int64)

    def gains(self, a_ci: int, cand: np.ndarray) -> np.ndarray:
        if self.measure is Measure.TRIPLE:
            return _triple_gains(self, a_ci, cand)
        if self.measure in (Measure.PERIMETER, Measure.AREA):
            return _hull_gains(self, a_ci, cand)
        return _cut_gains(self, a_ci, cand)

    def penalties(self, a_ci: int, cand: np.ndarray) -> np.ndarray:
        s_a = self.sample_at[a_ci]
        s_b = self.sample_at[cand]
        ctr_a = self.grid_centers[a_ci]
        ctr_b = self.grid_centers[cand]
        ref_a = self.ref_pos[s_a]
        ref_b = self.ref_pos[s_b]
        before = ((ctr_a - ref_a) ** 2).sum() + ((ctr_b - ref_b) ** 2).sum(axis=1)
        after = ((ctr_b - ref_a) ** 2).sum(axis=1) + ((ctr_a - ref_b) ** 2).sum(axis=1)
        return after - before

    def swap(self, a_ci: int, b_ci: int) -> None:
        ak, bk = int(self.label[a_ci]), int(self.label[b_ci])
        a = (a_ci % self.w, a_ci // self.w)
        b = (b_ci % self.w, b_ci // self.w)
        s_a, s_b = int(self.sample_at[a_ci]), int(self.sample_at[b_ci])
        self.sample_at[a_ci], self.sample_at[b_ci] = s_b, s_a
        self.cell_of[s_a], self.cell_of[s_b] = b_ci, a_ci
        self.label[a_ci], self.label[b_ci] = bk, ak
        self.cells[ak].discard(a)
        self.cells[ak].add(b)
        self.cells[bk].discard(b)
        self.cells[bk].add(a)
        for k, gone, new in ((ak, a, b), (bk, b, a)):
            if self.fields[k] is not None:
                self.fields[k].remove(gone)
                self.fields[k].add(new)
            self.scores[k] = self._fresh_score(k)
        for ci in (a_ci, b_ci):
            c, r = ci % self.w, ci // self.w
            for dc in (-1, 0, 1):
                for dr in (-1, 0, 1):
                    cc, rr = c + dc, r + dr
                    if 0 <= cc < self.w and 0 <= rr < self.h:
                        self._refresh_boundary(rr * self.w + cc)

    def _refresh_boundary(self, ci: int) -> None:
        lab = self.label[ci]
        if lab < 0:
            self.boundary.discard(ci)
            return
        c, r = ci % self.w, ci // self.w
        for dc, dr in _NEIGHBORS8:
            cc, rr = c + dc, r + dr
            if 0 <= cc < self.w and 0 <= rr < self.h:
                nb = self.label[rr * self.w + cc]
                if nb >= 0 and nb != lab:
                    self.boundary.add(ci)
                    return
        self.boundary.discard(ci)

    def to_layout(self) -> GridLayout:
        return GridLayout.from_cells(self.samples, self.spec, self.cell_of.tolist())


def _ray_counts(occ: np.ndarray, x0, y0, ux, uy, w: int, h: int) -> np.ndarray:
    """Members hit by rays start + i*step (i >= 1), per candidate row."""
    steps = np.arange(1, max(w, h), dtype=np.int64)
    x = np.atleast_1d(x0)[:, None] + ux[:, None] * steps[None, :]
    y = np.atleast_1d(y0)[:, None] + uy[:, None] * steps[None, :]
    ok = (x >= 0) & (x < w) & (y >= 0) & (y < h)
    idx = np.where(ok, y * w + x, 0)
    return (occ[idx] & ok).sum(axis=1)


def _triple_gains(state: _LocalState, a_ci: int, cand: np.ndarray) -> np.ndarray:
    w, h = state.w, state.h
    table = _gcd_table(max(w, h) + 1)
    k = len(cand)
    ak = int(state.label[a_ci])
    fa = state.field(ak)
    ax, ay = a_ci % w, a_ci // w
    bx, by = cand % w, cand // w
    dx, dy = bx - ax, by - ay
    g = table[np.abs(dx), np.abs(dy)]
    btw_ab = g - 1
    ux, uy = dx // g, dy // g

    ax_arr = np.full(k, ax, dtype=np.int64)
    ay_arr = np.full(k, ay, dtype=np.int64)
    pid, sx, sy = _enumerate_between(ax_arr, ay_arr, bx, by, g)
    seg_idx = sy * w + sx

    occ_a = fa.occ
    m1 = np.bincount(pid[occ_a[seg_idx]], minlength=k) if len(pid) else np.zeros(k, np.int64)
    r2 = _ray_counts(occ_a, bx, by, ux, uy, w, h)
    r1 = _ray_counts(occ_a, ax_arr, ay_arr, -ux, -uy, w, h)
    tot_a = fa.tot - fa.pair_tot[a_ci] + fa.pair_tot[cand] - btw_ab
    sat_a = (
        fa.sat
        - fa.pair_sat[a_ci]
        - fa.through[a_ci]
        + fa.pair_sat[cand]
        - m1
        - r1
        + fa.through[cand]
        - r2
    )
    score_a = np.where(tot_a == 0, 1.0, sat_a / np.maximum(tot_a, 1))

    score_b = np.empty(k)
    old_b = np.empty(k)
    cand_k = state.label[cand]
    for kb in np.unique(cand_k):
        sub = np.flatnonzero(cand_k == kb)
        fb = state.field(int(kb))
        occ_b = fb.occ
        if len(pid):
            m2 = np.bincount(pid[occ_b[seg_idx]], minlength=k)[sub]
        else:
            m2 = np.zeros(len(sub), np.int64)
        s1 = _ray_counts(occ_b, bx[sub], by[sub], ux[sub], uy[sub], w, h)
        s2 = _ray_counts(occ_b, ax_arr[sub], ay_arr[sub], -ux[sub], -uy[sub], w, h)
        bsub = cand[sub]
        tot_b = fb.tot - fb.pair_tot[bsub] + fb.pair_tot[a_ci] - btw_ab[sub]
        sat_b = (
            fb.sat
            - fb.pair_sat[bsub]
            - fb.through[bsub]
            + fb.pair_sat[a_ci]
            - m2
            - s1
            + fb.through[a_ci]
            - s2
        )
        score_b[sub] = np.where(tot_b == 0, 1.0, sat_b / np.maximum(tot_b, 1))
        old_b[sub] = state.scores[kb]
    return (score_a - state.scores[ak] + score_b - old_b) / state.K


def _cell_corners(c: int, r: int):
    return [(c, r), (c + 1, r), (c, r + 1), (c + 1, r + 1)]


def _hull_gains(state: _LocalState, a_ci: int, cand: np.ndarray) -> np.ndarray:
    w, h = state.w, state.h
    measure = state.measure.value
    k = len(cand)
    ak = int(state.label[a_ci])
    fa = state.field(ak)
    ax, ay = a_ci % w, a_ci // w
    a = (ax, ay)
    bx, by = cand % w, cand // w
    adj_ab = (np.abs(bx - ax) + np.abs(by - ay)) == 1

    verts0, perim0, area0 = fa.hull_without(a)
    edges0 = fa.edge_count - 4 + 2 * fa.nb4(a)
    pad_a = np.zeros((h + 2, w + 2), dtype=bool)
    pad_a[1:-1, 1:-1] = fa.occ2
    nb4_b_in_a = (
        pad_a[by + 1, bx].astype(np.int64)
        + pad_a[by + 1, bx + 2]
        + pad_a[by, bx + 1]
        + pad_a[by + 2, bx + 1]
    )
    edges_a = edges0 + 4 - 2 * (nb4_b_in_a - adj_ab)

    hv = np.asarray(verts0, dtype=np.int64)
    ev = np.roll(hv, -1, axis=0) - hv
    cxs = np.stack([bx, bx + 1, bx, bx + 1], axis=1)
    cys = np.stack([by, by, by + 1, by + 1], axis=1)
    relx = cxs[:, :, None] - hv[None, None, :, 0]
    rely = cys[:, :, None] - hv[None, None, :, 1]
    crosses = ev[None, None, :, 0] * rely - ev[None, None, :, 1] * relx
    inside = (crosses >= 0).all(axis=(1, 2))

    perim_a = np.full(k, perim0)
    area_a = np.full(k, area0)
    for j in np.flatnonzero(~inside):
        _, p, ar = _hull_chain(verts0 + _cell_corners(int(bx[j]), int(by[j])))
        perim_a[j] = p
        area_a[j] = ar
    score_a = np.array(
        [hull_scores(fa.n, perim_a[j], area_a[j], int(edges_a[j]), measure) for j in range(k)]
    )

    score_b = np.empty(k)
    old_b = np.empty(k)
    cand_k = state.label[cand]
    for kb in np.unique(cand_k):
        sub = np.flatnonzero(cand_k == kb)
        fb = state.field(int(kb))
        verts_b, _, _, critical_b = fb.hull()
        _, perim_ab, area_ab = _hull_chain(verts_b + _cell_corners(ax, ay))
        pad_b = np.zeros((h + 2, w + 2), dtype=bool)
        pad_b[1:-1, 1:-1] = fb.occ2
        sbx, sby = bx[sub], by[sub]
        nb4_b = (
            pad_b[sby + 1, sbx].astype(np.int64)
            + pad_b[sby + 1, sbx + 2]
            + pad_b[sby, sbx + 1]
            + pad_b[sby + 2, sbx + 1]
        )
        nb4_a = fb.nb4(a)
        edges_b = fb.edge_count + 2 * nb4_b - 2 * (nb4_a - adj_ab[sub])
        for pos, j in enumerate(sub):
            bcell = (int(bx[j]), int(by[j]))
            if bcell in critical_b:
                _, p, ar = fb.hull_without(bcell, extra=a)
            else:
                p, ar = perim_ab, area_ab
            score_b[j] = hull_scores(fb.n, p, ar, int(edges_b[pos]), measure)
        old_b[sub] = state.scores[kb]
    return (score_a - state.scores[ak] + score_b - old_b) / state.K


def _cut_gains(state: _LocalState, a_ci: int, cand: np.ndarray) -> np.ndarray:
    w = state.w
    ak = int(state.label[a_ci])
    a = (a_ci % w, a_ci // w)
    gains = np.empty(len(cand))
    for j, b_ci in enumerate(cand):
        bk = int(state.label[b_ci])
        b = (int(b_ci) % w, int(b_ci) // w)
        new_a = (state.cells[ak] - {a}) | {b}
        new_b = (state.cells[bk] - {b}) | {a}
        gains[j] = (
            cut_ratio_cells(new_a)
            - state.scores[ak]
            + cut_ratio_cells(new_b)
            - state.scores[bk]
        ) / state.K
    return gains


def evaluate_swap(
    layout: GridLayout,
    a: int,
    b: int,
    measure: Measure,
    reference: Optional[GridLayout] = None,
) -> SwapCandidate:
    """Gain and proximity penalty of swapping the samples in cells a and b.

    The gain re-scores only the two affected clusters; the penalty is the
    prox2 delta against `reference` (the layout itself when omitted).
    """
    if reference is None:
        reference = layout
    spec = layout.spec
    border = boundary_cells(layout)
    if a not in border or b not in border:
        raise LayoutError("both cells must be boundary cells")
    lab_a, lab_b = layout.labels[a], layout.labels[b]
    if lab_a == lab_b:
        raise LayoutError("cells belong to the same cluster")
    groups = layout.cluster_cells()
    cell_a, cell_b = spec.cell_of_index(a), spec.cell_of_index(b)
    new_a = (groups[lab_a] - {cell_a}) | {cell_b}
    new_b = (groups[lab_b] - {cell_b}) | {cell_a}
    k = len(groups)
    gain = (
        score_cells(new_a, measure)
        - score_cells(groups[lab_a], measure)
        + score_cells(new_b, measure)
        - score_cells(groups[lab_b], measure)
    ) / k
    sample_of = layout.assignment.sample_of
    s_a, s_b = sample_of[a], sample_of[b]
    ref = reference.sample_positions()
    ctr_a = np.array(spec.center(a))
    ctr_b = np.array(spec.center(b))
    before = ((ctr_a - ref[s_a]) ** 2).sum() + ((ctr_b - ref[s_b]) ** 2).sum()
    after = ((ctr_b - ref[s_a]) ** 2).sum() + ((ctr_a - ref[s_b]) ** 2).sum()
    return SwapCandidate(a, b, float(gain), float(after - before))


def local_adjust(
    layout: GridLayout,
    measure: Measure,
    seed: int = 0,
    input_layout: Optional[GridLayout] = None,
    max_passes: int = 1,
    stats: Optional[LocalStats] = None,
) -> GridLayout:
    """Greedy boundary-swap phase maximizing the mean cluster convexity.

    A pass shuffles the current boundary snapshot with the seeded RNG and
    visits every cell still on the boundary; the best positive-gain swap with
    an other-cluster boundary cell in its 3x3 neighborhood is applied (ties
    broken by the smaller proximity penalty, then the smaller cell index).
    The phase stops when all the boundary cells have been processed; callers
    may ask for extra passes, which repeat until one accepts no swap.
    """
    check = validate_layout(layout)
    if not check.ok:
        raise LayoutError("invalid layout: " + "; ".join(check.violations[:3]))
    state = _LocalState(layout, measure, input_layout or layout)
    rng = np.random.default_rng(seed)
    if stats is None:
        stats = LocalStats()
    for _ in range(max_passes):
        snapshot = sorted(state.boundary)
        if not snapshot:
            break
        order = rng.permutation(len(snapshot))
        accepted_this_pass = 0
        for oi in order:
            a_ci = snapshot[oi]
            if a_ci not in state.boundary:
                continue
            cand = state.candidates_for(a_ci)
            if len(cand) == 0:
                continue
            gains = state.gains(a_ci, cand)
            gmax = gains.max()
            if gmax <= GAIN_THRESHOLD:
                continue
            tied = np.flatnonzero(gains == gmax)
            if len(tied) > 1:
                pens = state.penalties(a_ci, cand[tied])
                tied = tied[pens == pens.min()]
            b_ci = int(cand[tied[0]])
            before = state.mean_score()
            state.swap(a_ci, b_ci)
            after = state.mean_score()
            if after <= before:
                raise LayoutError(
                    f"swap audit failed: mean score {before} -> {after} at cells "
                    f"({a_ci}, {b_ci})"
                )
            stats.audit.append((stats.passes, a_ci, b_ci, before, after))
            accepted_this_pass += 1
        stats.passes += 1
        stats.accepted += accepted_this_pass
        if accepted_this_pass == 0:
            break
    return state.to_layout()
