"""Global assignment: baseline projection-to-grid, blended-cost LAP, adaptive lambda.

The per-pair cost blends squared distance to the input layout (proximity) and
squared distance to the sample's cluster center (compactness).  Lambda is
either fixed or rebalanced each round toward the task that lags its anchor.
Costs are scaled to integers before the solve so optima never depend on
last-bit float noise.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from .measures import compactness_raw, proximity_raw
from .model import GridLayout, GridSpec, LayoutError, SampleSet

# Cost quantum for the integer-scaled solve; sums stay exactly representable.
COST_SCALE = float(2**20)


class DegenerateAnchorsError(LayoutError):
    """Anchor layouts coincide; the adaptive weight is undefined."""


def _scaled_int_costs(cost: np.ndarray) -> np.ndarray:
    n = max(cost.shape)
    cap = float(2**52) / n
    return np.clip(np.rint(cost * COST_SCALE), 0.0, cap)


def _lap(cost: np.ndarray) -> tuple[int, ...]:
    """Minimum-cost assignment of rows to columns (rows <= columns)."""
    rows, cols = linear_sum_assignment(_scaled_int_costs(cost))
    out = np.empty(cost.shape[0], dtype=np.int64)
    out[rows] = cols
    return tuple(int(c) for c in out)


def solve_lap(cost: np.ndarray) -> tuple[int, ...]:
    """Optimal one-to-one matching for a square cost matrix.

    Returns the assigned column for each row.  Deterministic for a fixed
    input, including among cost ties.
    """
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise LayoutError(f"cost matrix must be square, got {cost.shape}")
    if not np.isfinite(cost).all():
        raise LayoutError("cost matrix must be finite")
    if cost.min() < 0:
        raise LayoutError("cost matrix must be non-negative")
    return _lap(cost)


def lap_total_cost(cost: np.ndarray, cols: tuple[int, ...]) -> float:
    cost = np.asarray(cost, dtype=float)
    return float(cost[np.arange(len(cols)), list(cols)].sum())


def _sq_dist_matrix(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Pairwise squared distances via the expanded form (one matmul)."""
    p_sq = (points * points).sum(axis=1)
    c_sq = (centers * centers).sum(axis=1)
    cost = p_sq[:, None] - 2.0 * (points @ centers.T) + c_sq[None, :]
    np.maximum(cost, 0.0, out=cost)
    return cost


def baseline_grid_from_projection(samples: SampleSet, spec: GridSpec) -> GridLayout:
    """Assign projected samples to cells by a linear assignment on squared distance.

    Positions are min-max scaled into the grid extent first; the result is the
    cluster-agnostic starting layout every pipeline builds on.
    """
    n = len(samples)
    if n == 0:
        raise LayoutError("sample set is empty")
    if n > spec.capacity:
        raise LayoutError(f"{n} samples exceed grid capacity {spec.capacity}")
    pos = samples.positions()
    if not np.isfinite(pos).all():
        raise LayoutError("positions must be finite")
    scaled = np.empty_like(pos)
    for axis, extent in ((0, spec.width), (1, spec.height)):
        lo = pos[:, axis].min()
        span = pos[:, axis].max() - lo
        if span == 0:
            scaled[:, axis] = extent / 2.0
        else:
            scaled[:, axis] = (pos[:, axis] - lo) / span * extent
    cost = _sq_dist_matrix(scaled, spec.centers())
    return GridLayout.from_cells(samples, spec, _lap(cost))


def cluster_centers(layout: GridLayout) -> dict[str, tuple[float, float]]:
    """Mean cell center of each cluster's members in this layout."""
    pos = layout.sample_positions()
    clusters = layout.samples.clusters()
    acc: dict[str, list] = {}
    for i, cluster in enumerate(clusters):
        acc.setdefault(cluster, []).append(pos[i])
    return {c: tuple(np.mean(v, axis=0)) for c, v in sorted(acc.items())}


def build_cost_matrix(
    input_layout: GridLayout,
    centers: dict[str, tuple[float, float]],
    lam: float,
) -> np.ndarray:
    """Blended cost: lam * ||v_j - v_i||^2 + (1 - lam) * ||v_j - mu_i||^2.

    Rows are samples, columns are all grid cells of the input layout's grid.
    """
    if not 0.0 <= lam <= 1.0:
        raise LayoutError(f"lambda must be in [0, 1], got {lam}")
    spec = input_layout.spec
    v_i = input_layout.sample_positions()
    mu = np.empty_like(v_i)
    for i, cluster in enumerate(input_layout.samples.clusters()):
        if cluster not in centers:
            raise LayoutError(f"missing cluster center for {cluster!r}")
        mu[i] = centers[cluster]
    cells = spec.centers()
    # lam*||c-v||^2 + (1-lam)*||c-mu||^2 expands to |c|^2 - 2 c.(lam*v+(1-lam)*mu)
    # + lam*|v|^2 + (1-lam)*|mu|^2, which is a single matmul over cells.
    blend = lam * v_i + (1.0 - lam) * mu
    const = lam * (v_i * v_i).sum(axis=1) + (1.0 - lam) * (mu * mu).sum(axis=1)
    c_sq = (cells * cells).sum(axis=1)
    cost = c_sq[None, :] - 2.0 * (blend @ cells.T) + const[:, None]
    np.maximum(cost, 0.0, out=cost)
    return cost


def compute_lambda(
    prox: tuple[float, float, float],
    comp: tuple[float, float, float],
) -> float:
    """Rebalanced weight from task performances against their anchors.

    `prox` and `comp` are (current, at proximity anchor, at compactness
    anchor) raw values.  The weight is the proximity lag divided by the total
    lag, clamped to [0, 1]; degenerate anchors raise DegenerateAnchorsError.
    """
    prox_cur, prox_p, prox_c = prox
    comp_cur, comp_p, comp_c = comp
    prox_span = prox_c - prox_p
    comp_span = comp_p - comp_c
    if prox_span <= 0 or comp_span <= 0:
        raise DegenerateAnchorsError("anchors coincide")
    d_prox = (prox_cur - prox_p) / prox_span
    d_comp = (comp_cur - comp_c) / comp_span
    total = d_prox + d_comp
    if total <= 0:
        raise DegenerateAnchorsError("anchors coincide")
    return min(1.0, max(0.0, d_prox / total))


@dataclass
class LambdaSchedule:
    """Weight schedule plus a per-iteration record of (lambda, prox2, comp)."""

    mode: str  # "adaptive" | "fixed"
    lam: Optional[float] = None
    max_iters: int = 20
    history: list[tuple[float, float, float]] = field(default_factory=list)
    lap_solves: int = 0
    converged: bool = True

    def __post_init__(self) -> None:
        if self.mode not in ("adaptive", "fixed"):
            raise LayoutError(f"unknown schedule mode {self.mode!r}")
        if self.mode == "fixed":
            if self.lam is None or not 0.0 <= self.lam <= 1.0:
                raise LayoutError("fixed schedule needs lambda in [0, 1]")

    @classmethod
    def adaptive(cls, max_iters: int = 20) -> "LambdaSchedule":
        return cls(mode="adaptive", max_iters=max_iters)

    @classmethod
    def fixed(cls, lam: float) -> "LambdaSchedule":
        return cls(mode="fixed", lam=lam)


def _solve_at(input_layout: GridLayout, current: GridLayout, lam: float) -> GridLayout:
    mu = cluster_centers(current)
    cost = build_cost_matrix(input_layout, mu, lam)
    cols = _lap(cost)
    return GridLayout.from_cells(input_layout.samples, input_layout.spec, cols)


def _alternate(
    input_layout: GridLayout,
    lam: float,
    schedule: Optional[LambdaSchedule] = None,
    max_rounds: int = 10,
    rel_tol: float = 3e-3,
) -> tuple[GridLayout, int]:
    """Freeze centers from the current layout, solve, repeat until settled.

    The loop stops when the assignment or the cell labeling repeats, or when
    the blended objective stops improving by more than `rel_tol` relatively.
    The labeling check matters at small lambda: costs then depend on samples
    only through their cluster, so equal-cost within-cluster permutations
    keep the exact assignment from ever repeating.
    """
    current = input_layout
    seen_assign = {current.assignment.cell_of}
    seen_labels = {current.labels}
    prev_obj = None
    solves = 0
    for _ in range(max_rounds):
        current = _solve_at(input_layout, current, lam)
        solves += 1
        if schedule is not None:
            schedule.lap_solves += 1
        obj = lam * proximity_raw(current, input_layout) + (1.0 - lam) * compactness_raw(
            current
        )
        if current.assignment.cell_of in seen_assign or current.labels in seen_labels:
            break
        if prev_obj is not None and obj >= prev_obj * (1.0 - rel_tol):
            break
        seen_assign.add(current.assignment.cell_of)
        seen_labels.add(current.labels)
        prev_obj = obj
    return current, solves


def global_assignment(input_layout: GridLayout, schedule: LambdaSchedule) -> GridLayout:
    """Run the global phase against the input layout under the given schedule.

    Fixed mode alternates center updates and solves at the fixed weight until
    the assignment repeats (at most 10 rounds).  Adaptive mode anchors on the
    input (proximity-optimal) and a compactness-only solution, then iterates
    solve / recenter / reweight until an assignment repeats or max_iters.
    """
    from .model import validate_layout

    check = validate_layout(input_layout)
    if not check.ok:
        raise LayoutError("invalid input layout: " + "; ".join(check.violations[:3]))
    if schedule.mode == "fixed":
        layout, _ = _alternate(input_layout, schedule.lam, schedule)
        return layout

    delta_c, _ = _alternate(input_layout, 0.0, schedule, rel_tol=1e-2)
    prox_p = 0.0
    comp_p = compactness_raw(input_layout)
    prox_c = proximity_raw(delta_c, input_layout)
    comp_c = compactness_raw(delta_c)

    lam = 0.5
    current = input_layout
    n = len(input_layout.samples)
    churn_tol = max(1, round(0.005 * n))
    recent: deque = deque([input_layout.assignment.cell_of], maxlen=3)
    recent_obj: deque = deque(maxlen=3)
    prev_labels = input_layout.labels
    schedule.converged = False
    for _ in range(schedule.max_iters):
        current = _solve_at(input_layout, current, lam)
        schedule.lap_solves += 1
        prox_cur = proximity_raw(current, input_layout)
        comp_cur = compactness_raw(current)
        schedule.history.append((lam, prox_cur, comp_cur))
        key = current.assignment.cell_of
        # Exact assignment repetition is unreachable at scale (equal-cost
        # ties churn samples within clusters forever), so the layout also
        # counts as converged when the labeling changes in at most 0.5% of
        # cells or the objective pair revisits a recent value exactly.
        churn = sum(1 for a, b in zip(prev_labels, current.labels) if a != b)
        if key in recent or churn <= churn_tol or (prox_cur, comp_cur) in recent_obj:
            schedule.converged = True
            break
        recent.append(key)
        recent_obj.append((prox_cur, comp_cur))
        prev_labels = current.labels
        try:
            target = compute_lambda(
                (prox_cur, prox_p, prox_c), (comp_cur, comp_p, comp_c)
            )
        except DegenerateAnchorsError:
            target = 0.5
        # Damped update: the raw reweighting rule overshoots and settles
        # into a period-2 limit cycle between a proximity-heavy and a
        # compactness-heavy layout.
        lam = 0.5 * (lam + target)
    return current
