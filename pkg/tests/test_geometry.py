import math

import numpy as np
import pytest

from gridweave.geometry import (
    DegenerateHullError,
    Polygon,
    collinear_triple_counts,
    convex_hull,
    halfplane_area_fraction,
    hull_of_cells,
    polygon_area,
    polygon_perimeter,
)

L_TROMINO = {(0, 0), (1, 0), (0, 1)}
U_PENTOMINO = {(0, 0), (1, 0), (2, 0), (0, 1), (2, 1)}


def cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def brute_force_hull(points):
    """O(n^3) hull: every ordered pair is tested as a candidate CCW edge."""
    pts = sorted(set(points))
    nxt = {}
    for u in pts:
        for v in pts:
            if u == v:
                continue
            is_edge = True
            for p in pts:
                if p in (u, v):
                    continue
                c = cross(u, v, p)
                if c < 0:
                    is_edge = False
                    break
                if c == 0:
                    within = (
                        min(u[0], v[0]) <= p[0] <= max(u[0], v[0])
                        and min(u[1], v[1]) <= p[1] <= max(u[1], v[1])
                    )
                    if not within:
                        is_edge = False
                        break
            if is_edge:
                nxt[u] = v
    start = min(nxt)
    out = [start]
    cur = nxt[start]
    while cur != start:
        out.append(cur)
        cur = nxt[cur]
    return out


def brute_force_triples(cells):
    cells = set(cells)
    pts = sorted(cells)
    total = satisfied = 0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            (x1, y1), (x2, y2) = pts[i], pts[j]
            g = math.gcd(abs(x2 - x1), abs(y2 - y1))
            for t in range(1, g):
                mid = (x1 + t * (x2 - x1) // g, y1 + t * (y2 - y1) // g)
                total += 1
                satisfied += mid in cells
    return total, satisfied


def test_hull_of_unit_square_is_square():
    hull = convex_hull([(0, 0), (1, 0), (1, 1), (0, 1)])
    assert hull.vertices == ((0, 0), (1, 0), (1, 1), (0, 1))


def test_hull_of_l_tromino_boundary_vertices():
    hull = convex_hull([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])
    assert hull.vertices == ((0, 0), (2, 0), (2, 1), (1, 2), (0, 2))


def test_hull_drops_collinear_points():
    hull = convex_hull([(0, 0), (1, 0), (2, 0), (2, 2), (0, 2), (1, 1)])
    assert hull.vertices == ((0, 0), (2, 0), (2, 2), (0, 2))


def test_hull_degenerate_collinear():
    with pytest.raises(DegenerateHullError):
        convex_hull([(0, 0), (1, 1), (2, 2), (3, 3)])


def test_hull_matches_brute_force_on_random_lattice_sets():
    rng = np.random.default_rng(11)
    for _ in range(40):
        pts = {tuple(p) for p in rng.integers(0, 12, size=(30, 2))}
        if len(pts) < 3:
            continue
        try:
            hull = convex_hull(pts)
        except DegenerateHullError:
            continue
        assert list(hull.vertices) == brute_force_hull(pts)


def test_polygon_area_examples():
    assert polygon_area(Polygon(((0, 0), (1, 0), (1, 1), (0, 1)))) == 1.0
    l_hull = convex_hull([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])
    assert polygon_area(l_hull) == 3.5


def test_polygon_area_of_worked_glyph():
    # Row of four cells plus one on top of the left end: shape area 5,
    # hull area 5 + 1.5 = 6.5, hull perimeter 8 + sqrt(10).
    glyph = {(0, 0), (1, 0), (2, 0), (3, 0), (0, 1)}
    hull = hull_of_cells(glyph)
    assert polygon_area(hull) == 6.5
    assert polygon_perimeter(hull) == pytest.approx(8 + math.sqrt(10), abs=1e-12)


def test_polygon_perimeter_examples():
    assert polygon_perimeter(Polygon(((0, 0), (1, 0), (1, 1), (0, 1)))) == 4.0
    l_hull = convex_hull([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])
    assert polygon_perimeter(l_hull) == pytest.approx(6 + math.sqrt(2), abs=1e-12)
    l_boundary = Polygon(((0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)))
    assert polygon_perimeter(l_boundary) == 8.0


def test_triple_counts_gap_free_row():
    cells = {(c, 0) for c in range(5)}
    tc = collinear_triple_counts(cells)
    # Pairs at distance d contribute d-1 interior centers.
    expected = sum(d - 1 for d in range(2, 5) for _ in range(5 - d))
    assert tc.total == expected
    assert tc.satisfied == tc.total


def test_triple_counts_l_tromino_vacuous():
    tc = collinear_triple_counts(L_TROMINO)
    assert tc.total == 0


def test_triple_counts_u_pentomino():
    tc = collinear_triple_counts(U_PENTOMINO)
    assert tc.total == 2
    assert tc.satisfied == 1


def test_triple_counts_match_brute_force():
    rng = np.random.default_rng(3)
    for _ in range(25):
        cells = {tuple(p) for p in rng.integers(0, 9, size=(20, 2))}
        tc = collinear_triple_counts(cells)
        assert (tc.total, tc.satisfied) == brute_force_triples(cells)


def test_triple_counts_invariant_under_symmetries():
    cells = {(0, 0), (1, 0), (2, 0), (2, 1), (4, 2), (0, 3)}
    base = collinear_triple_counts(cells)
    translated = {(c + 7, r - 2) for c, r in cells}
    rotated = {(r, -c) for c, r in cells}
    reflected = {(-c, r) for c, r in cells}
    for variant in (translated, rotated, reflected):
        tc = collinear_triple_counts(variant)
        assert (tc.total, tc.satisfied) == (base.total, base.satisfied)


def test_halfplane_fraction_rectangle_edges_are_one():
    rect = {(c, r) for c in range(3) for r in range(2)}
    for edge in [((0, 0), (1, 0)), ((3, 0), (3, 1)), ((1, 2), (0, 2)), ((0, 1), (0, 0))]:
        assert halfplane_area_fraction(rect, edge) == 1.0


def test_halfplane_fraction_l_tromino_notch_edges():
    assert halfplane_area_fraction(L_TROMINO, ((1, 1), (2, 1))) == pytest.approx(2 / 3)
    assert halfplane_area_fraction(L_TROMINO, ((1, 1), (1, 2))) == pytest.approx(2 / 3)


def test_halfplane_fraction_rejects_off_boundary_edge():
    # Edge between two occupied cells is interior, not boundary.
    with pytest.raises(ValueError):
        halfplane_area_fraction({(0, 0), (1, 0)}, ((1, 0), (1, 1)))
    # Edge with no adjacent occupied cell is outside the shape.
    with pytest.raises(ValueError):
        halfplane_area_fraction({(0, 0)}, ((4, 4), (5, 4)))


def test_hull_area_at_least_shape_area():
    rng = np.random.default_rng(5)
    for _ in range(20):
        cells = {tuple(p) for p in rng.integers(0, 6, size=(12, 2))}
        hull = hull_of_cells(cells)
        assert polygon_area(hull) >= len(cells) - 1e-9
