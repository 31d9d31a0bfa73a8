import numpy as np
import pytest

from gridweave._swapeval import HullField, TripleField, _hull_chain, hull_scores
from gridweave.geometry import hull_of_cells, polygon_area, polygon_perimeter
from gridweave.measures import Measure, boundary_edge_count, score_cells

from test_geometry import brute_force_triples


def random_cells(rng, w, h, count):
    cells = {(int(c), int(r)) for c, r in rng.integers(0, [w, h], size=(count, 2))}
    return cells


def assert_fields_equal(field, fresh):
    np.testing.assert_array_equal(field.occ, fresh.occ)
    np.testing.assert_array_equal(field.pair_tot, fresh.pair_tot)
    np.testing.assert_array_equal(field.pair_sat, fresh.pair_sat)
    np.testing.assert_array_equal(field.through, fresh.through)
    assert field.tot == fresh.tot
    assert field.sat == fresh.sat
    assert field.n == fresh.n


def test_triple_field_build_matches_brute_force():
    rng = np.random.default_rng(1)
    for _ in range(10):
        cells = random_cells(rng, 6, 6, 10)
        field = TripleField(6, 6, cells)
        total, satisfied = brute_force_triples(cells)
        assert field.tot == total
        assert field.sat == satisfied
        assert field.score() == score_cells(cells, Measure.TRIPLE)
        # Internal consistency: each satisfied triple is counted once at its
        # middle cell, and pair totals double-count each pair.
        occ_idx = np.flatnonzero(field.occ)
        assert field.through[occ_idx].sum() == satisfied
        assert field.pair_tot[occ_idx].sum() == 2 * total


def test_triple_field_incremental_matches_rebuild():
    rng = np.random.default_rng(2)
    w = h = 7
    cells = random_cells(rng, w, h, 12)
    field = TripleField(w, h, cells)
    current = set(cells)
    for step in range(40):
        if len(current) > 1 and (step % 2 == 0 or len(current) > 20):
            cell = sorted(current)[rng.integers(len(current))]
            field.remove(cell)
            current.discard(cell)
        else:
            free = sorted({(c, r) for c in range(w) for r in range(h)} - current)
            cell = free[rng.integers(len(free))]
            field.add(cell)
            current.add(cell)
        assert_fields_equal(field, TripleField(w, h, current))


def test_triple_field_survives_singleton():
    field = TripleField(4, 4, {(1, 1)})
    field.remove((1, 1))
    assert field.n == 0
    field.add((2, 3))
    assert_fields_equal(field, TripleField(4, 4, {(2, 3)}))
    assert field.score() == 1.0


def test_hull_field_edges_and_hull_match_geometry():
    rng = np.random.default_rng(3)
    for _ in range(12):
        cells = random_cells(rng, 7, 7, 14)
        field = HullField(7, 7, cells)
        assert field.edge_count == boundary_edge_count(cells)
        verts, perim, area = _hull_chain(
            [p for cell in cells for p in
             [(cell[0], cell[1]), (cell[0] + 1, cell[1]), (cell[0], cell[1] + 1),
              (cell[0] + 1, cell[1] + 1)]]
        )
        hv, hp, ha, _ = field.hull()
        ref = hull_of_cells(cells)
        assert hp == pytest.approx(polygon_perimeter(ref), abs=1e-12)
        assert ha == pytest.approx(polygon_area(ref), abs=1e-12)
        assert perim == pytest.approx(hp)
        assert area == pytest.approx(ha)


def test_hull_field_incremental_updates():
    rng = np.random.default_rng(4)
    w = h = 6
    current = random_cells(rng, w, h, 10)
    field = HullField(w, h, current)
    for step in range(30):
        if len(current) > 1 and step % 2 == 0:
            cell = sorted(current)[rng.integers(len(current))]
            field.remove(cell)
            current.discard(cell)
        else:
            free = sorted({(c, r) for c in range(w) for r in range(h)} - current)
            cell = free[rng.integers(len(free))]
            field.add(cell)
            current.add(cell)
        fresh = HullField(w, h, current)
        assert field.edge_count == fresh.edge_count
        _, hp, ha, _ = field.hull()
        _, fp, fa, _ = fresh.hull()
        assert hp == pytest.approx(fp)
        assert ha == pytest.approx(fa)


def test_hull_without_drop_and_extra():
    rng = np.random.default_rng(5)
    for _ in range(15):
        cells = random_cells(rng, 6, 6, 9)
        if len(cells) < 2:
            continue
        field = HullField(6, 6, cells)
        ordered = sorted(cells)
        drop = ordered[rng.integers(len(ordered))]
        free = sorted({(c, r) for c in range(6) for r in range(6)} - cells)
        extra = free[rng.integers(len(free))]
        _, perim, area = field.hull_without(drop, extra=extra)
        expected = hull_of_cells((cells - {drop}) | {extra})
        assert perim == pytest.approx(polygon_perimeter(expected), abs=1e-12)
        assert area == pytest.approx(polygon_area(expected), abs=1e-12)


def test_hull_scores_match_score_cells():
    rng = np.random.default_rng(6)
    for _ in range(10):
        cells = random_cells(rng, 6, 6, 11)
        field = HullField(6, 6, cells)
        _, perim, area, _ = field.hull()
        assert hull_scores(field.n, perim, area, field.edge_count, "perimeter") == (
            pytest.approx(score_cells(cells, Measure.PERIMETER))
        )
        assert hull_scores(field.n, perim, area, field.edge_count, "area") == (
            pytest.approx(score_cells(cells, Measure.AREA))
        )
