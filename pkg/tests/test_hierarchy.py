import numpy as np
import pytest

from gridweave.hierarchy import _proportional_quota, build_root, zoom
from gridweave.measures import report
from gridweave.model import GridSpec, LayoutError, Sample, SampleSet, validate_layout

from test_assign import gaussian_samples


def test_quota_proportional_example():
    assert _proportional_quota([100, 100], 20) == [10, 10]
    assert _proportional_quota([30, 10], 4) == [3, 1]


def test_quota_every_cluster_gets_one():
    quota = _proportional_quota([100, 1, 1], 5)
    assert all(q >= 1 for q in quota)
    assert sum(quota) == 5


def test_quota_rejects_too_many_clusters():
    with pytest.raises(LayoutError):
        _proportional_quota([5, 5, 5], 2)


def test_build_root_small_set_all_representatives():
    rng = np.random.default_rng(1)
    samples = gaussian_samples(rng, [(0.3, 0.3), (0.7, 0.7)], 4)
    node = build_root(samples, GridSpec(3, 3), seed=5)
    assert set(node.representative_ids) == {s.id for s in samples.samples}
    assert all(len(v) == 0 for v in node.assigned.values())
    assert validate_layout(node.layout).ok


def test_build_root_stratified_counts():
    rng = np.random.default_rng(2)
    samples = gaussian_samples(rng, [(0.25, 0.25), (0.75, 0.75)], 100, sigma=0.04)
    node = build_root(samples, GridSpec(5, 4), seed=3)
    reps = [s for s in samples.samples if s.id in set(node.representative_ids)]
    per_cluster = {}
    for s in reps:
        per_cluster[s.cluster] = per_cluster.get(s.cluster, 0) + 1
    assert per_cluster == {"c0": 10, "c1": 10}
    shown = set(node.representative_ids)
    hidden = {sid for v in node.assigned.values() for sid in v}
    assert shown | hidden == {s.id for s in samples.samples}
    assert not shown & hidden


def test_build_root_nearest_representative_oracle():
    rng = np.random.default_rng(3)
    samples = gaussian_samples(rng, [(0.2, 0.5), (0.8, 0.5)], 40, sigma=0.08)
    node = build_root(samples, GridSpec(4, 4), seed=9)
    by_id = {s.id: s for s in samples.samples}
    rep_pos = {rid: np.array(by_id[rid].position) for rid in node.representative_ids}
    for rid, members in node.assigned.items():
        for sid in members:
            p = np.array(by_id[sid].position)
            best = min(rep_pos, key=lambda r: ((rep_pos[r] - p) ** 2).sum())
            assert ((rep_pos[best] - p) ** 2).sum() == pytest.approx(
                ((rep_pos[rid] - p) ** 2).sum()
            )


def test_build_root_deterministic():
    rng = np.random.default_rng(4)
    samples = gaussian_samples(rng, [(0.3, 0.4), (0.6, 0.6)], 50, sigma=0.06)
    a = build_root(samples, GridSpec(4, 4), seed=7)
    b = build_root(samples, GridSpec(4, 4), seed=7)
    assert a.representative_ids == b.representative_ids
    assert a.layout.assignment.cell_of == b.layout.assignment.cell_of


def test_build_root_report_against_anchored_input():
    rng = np.random.default_rng(5)
    samples = gaussian_samples(rng, [(0.3, 0.3), (0.7, 0.6)], 30, sigma=0.05)
    node = build_root(samples, GridSpec(4, 4), seed=1)
    rep = report(node.layout, node.input_layout)
    assert 0 < rep.proximity <= 1


def test_zoom_small_pool_shows_everything():
    rng = np.random.default_rng(6)
    samples = gaussian_samples(rng, [(0.3, 0.3), (0.7, 0.7)], 30, sigma=0.05)
    root = build_root(samples, GridSpec(4, 4), seed=2)
    cells = sorted(root.layout.cluster_cells()["c0"])[:2]
    pool = set()
    for c, r in cells:
        si = root.layout.assignment.sample_of[root.layout.spec.cell_index(c, r)]
        rid = root.layout.samples.samples[si].id
        pool.add(rid)
        pool.update(root.assigned[rid])
    child = zoom(root, cells, GridSpec(6, 6), seed=11)
    if len(pool) <= 36:
        assert set(child.representative_ids) == pool


def test_zoom_single_lone_representative_centers():
    samples = SampleSet(
        (
            Sample("a0", (0.1, 0.1), "a"),
            Sample("a1", (0.9, 0.9), "a"),
        )
    )
    root = build_root(samples, GridSpec(2, 1), seed=0)
    cell = root.layout.spec.cell_of_index(root.layout.assignment.cell_of[0])
    child = zoom(root, [cell], GridSpec(3, 3), seed=0)
    assert len(child.representative_ids) == 1
    assert child.layout.assignment.cell_of[0] == child.layout.spec.cell_index(1, 1)


def test_zoom_never_invents_samples():
    rng = np.random.default_rng(7)
    samples = gaussian_samples(rng, [(0.25, 0.3), (0.7, 0.65)], 120, sigma=0.05)
    root = build_root(samples, GridSpec(5, 5), seed=4)
    cells = sorted(root.layout.cluster_cells()["c1"])
    allowed = set()
    for c, r in cells:
        si = root.layout.assignment.sample_of[root.layout.spec.cell_index(c, r)]
        rid = root.layout.samples.samples[si].id
        allowed.add(rid)
        allowed.update(root.assigned[rid])
    child = zoom(root, cells, GridSpec(5, 5), seed=13)
    shown = set(child.representative_ids) | {
        sid for v in child.assigned.values() for sid in v
    }
    assert shown <= allowed
    assert validate_layout(child.layout).ok


def test_zoom_rejects_empty_and_unassigned():
    rng = np.random.default_rng(8)
    samples = gaussian_samples(rng, [(0.4, 0.5)], 3)
    root = build_root(samples, GridSpec(2, 2), seed=0)
    with pytest.raises(LayoutError):
        zoom(root, [], GridSpec(2, 2), seed=0)
    empty_cell = next(
        root.layout.spec.cell_of_index(i)
        for i, s in enumerate(root.layout.assignment.sample_of)
        if s is None
    )
    with pytest.raises(LayoutError):
        zoom(root, [empty_cell], GridSpec(2, 2), seed=0)


def test_zoom_preserves_relative_orderings():
    rng = np.random.default_rng(9)
    samples = gaussian_samples(rng, [(0.25, 0.3), (0.75, 0.7), (0.3, 0.8)], 150, sigma=0.05)
    root = build_root(samples, GridSpec(6, 6), seed=3)
    cells = sorted(root.layout.cluster_cells()["c0"] | root.layout.cluster_cells()["c2"])
    child = zoom(root, cells, GridSpec(6, 6), seed=21)
    spec_p = root.layout.spec
    spec_c = child.layout.spec
    parent_pos = {}
    for c, r in cells:
        si = root.layout.assignment.sample_of[spec_p.cell_index(c, r)]
        parent_pos[root.layout.samples.samples[si].id] = (c, r)
    child_pos = {}
    idx = child.layout.samples.index_of()
    for rid in parent_pos:
        if rid in idx:
            child_pos[rid] = spec_c.cell_of_index(child.layout.assignment.cell_of[idx[rid]])
    ids = sorted(child_pos)
    agree = total = 0
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            for axis in (0, 1):
                dp = parent_pos[ids[i]][axis] - parent_pos[ids[j]][axis]
                dc = child_pos[ids[i]][axis] - child_pos[ids[j]][axis]
                if dp != 0:
                    total += 1
                    agree += (dp > 0) == (dc > 0) if dc != 0 else 0
    assert total > 0
    assert agree / total >= 0.9
