import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from outer_billiards.billiard import TABLE_NAMES, make_table, orbit
from outer_billiards.exactfield import ZERO
from outer_billiards.geometry import ConvexPolygon, Isometry, Location, Point, contains, interior_sample
from outer_billiards.structure import (
    NotPeriodicError,
    PiecewiseMap,
    BoundaryPoint,
    check_invariants,
    component_of,
    invariant_figure,
    lattice_census,
    level_periods,
    random_outside_point,
    return_partition,
    scan_classify,
    _motion,
)

H = Fraction(1, 2)
TABLES = {name: make_table(name) for name in TABLE_NAMES}


def cell(x0, y0):
    return ConvexPolygon([Point(x0, y0), Point(x0 + 1, y0), Point(x0 + 1, y0 + 1), Point(x0, y0 + 1)])


def test_component_unit_cells():
    sq = TABLES["square"]
    c = component_of(sq, Point(H, Fraction(3, 2)))
    assert c.region == cell(0, 1) and c.period == 4 and not c.center_special
    c = component_of(sq, Point(Fraction(3, 2), Fraction(3, 2)))
    assert c.region == cell(1, 1) and c.period == 8


def test_component_of_non_periodic_point():
    with pytest.raises(NotPeriodicError):
        component_of(TABLES["square"], Point(-1, 0))


def test_odd_centre_is_flagged():
    t = TABLES["hexagon_lattice"]
    census = lattice_census(t, 1)
    hexagon = next(o for o in census.orbits if o.shape == 6)
    centre = hexagon.components[0].centroid()
    c = component_of(t, centre)
    assert c.center_special and c.period == 6 and c.center_period == 3
    assert orbit(t, centre, 100).period == 3
    assert c.region == hexagon.components[0]


def test_single_component_return_partition():
    sq = TABLES["square"]
    part = return_partition(sq, cell(0, 1), budget=100, use_folded=False)
    assert len(part.pieces) == 1 and not part.unresolved
    piece = part.pieces[0]
    assert piece.return_time == 4 and piece.side_count == 4
    assert piece.region.as_convex() == cell(0, 1)


def test_return_partition_budget_is_reported():
    sq = TABLES["square"]
    part = return_partition(sq, cell(5, 5), budget=3, use_folded=False)
    assert part.pieces == [] and part.unresolved


def test_invariant_figure_of_invariant_square():
    sq = cell(0, 0)
    assert invariant_figure(sq, Isometry.rotation(90, Point(H, H))) == sq


def test_invariant_figure_empty_marker():
    tri = ConvexPolygon([Point(0, 0), Point(1, 0), Point(0, 1)])
    assert invariant_figure(tri, Isometry.rotation(180, Point(5, 5))) is None


def test_invariant_figure_rejects_wrong_order():
    with pytest.raises(ValueError):
        invariant_figure(cell(0, 0), Isometry.rotation(90), order=3)


def test_piecewise_map_boundaries():
    pm = PiecewiseMap([("a", cell(0, 0), Isometry.translation(Point(1, 0)))])
    assert pm.apply(Point(H, H)) == ("a", Point(Fraction(3, 2), H))
    with pytest.raises(BoundaryPoint):
        pm.apply(Point(1, H))


# -- censuses --------------------------------------------------------------------------


def test_level_periods():
    assert level_periods("square", 3) == (12,)
    assert level_periods("hexagon_lattice", 2) == (18,)
    assert level_periods("triangle_lattice", 1) == (6, 12)
    with pytest.raises(ValueError):
        level_periods("octagon", 1)


def test_square_census_ring_three():
    assert lattice_census(TABLES["square"], 3).summary() == [(4, 12, 12)]


def test_census_rejects_regular_tables():
    with pytest.raises(ValueError):
        lattice_census(TABLES["octagon"], 1)


def _brute_force(t, periods, reach):
    """All components with the given periods seen from a full grid of exact points."""
    found = set()
    q = 4
    for a in range(-q * reach, q * reach + 1):
        for b in range(-q * reach, q * reach + 1):
            x = Point(Fraction(a, q) + Fraction(1, 1013), Fraction(b, q) + Fraction(1, 1019))
            if any(c for c in found if contains(c, x) is Location.INTERIOR):
                continue
            if all(e.side(x) >= 0 for e in t.polygon.edges()):
                continue
            res = orbit(t, x, max(periods))
            if res.is_periodic and res.period in periods:
                found.add(component_of(t, x, res=res).region)
    return found


@pytest.mark.parametrize("name, level, reach", [("hexagon_lattice", 1, 6), ("hexagon_lattice", 2, 10), ("triangle_lattice", 1, 5), ("square", 2, 4)])
def test_census_matches_full_grid(name, level, reach):
    t = TABLES[name]
    census = lattice_census(t, level)
    mine = {c for o in census.orbits for c in o.components}
    assert mine == _brute_force(t, level_periods(name, level), reach)


def test_hexagon_census_level_two():
    # two hexagon orbits of 6*2-3 = 9 each, one triangle orbit of 18
    census = lattice_census(TABLES["hexagon_lattice"], 2)
    assert census.summary() == [(3, 18, 18), (6, 9, 18), (6, 9, 18)]


def test_triangle_census_level_one():
    census = lattice_census(TABLES["triangle_lattice"], 1)
    assert census.count(6) == 3 and census.count(3) == 12


# -- scans -------------------------------------------------------------------------------


def test_scan_single_cell():
    g = scan_classify(TABLES["square"], (2, 2, 3, 3), (1, 1), 100)
    assert g.labels == [[("periodic", orbit(TABLES["square"], Point(Fraction(5, 2), Fraction(5, 2)), 100).period)]]
    assert g.cell_center(0, 0) == Point(Fraction(5, 2), Fraction(5, 2))


def test_scan_integer_centres_are_finite():
    # with unit cells centred on lattice points every outside centre is finite
    g = scan_classify(TABLES["square"], (Fraction(-7, 2), Fraction(-7, 2), Fraction(7, 2), Fraction(7, 2)), (7, 7), 1000)
    kinds = {lab[0] for row in g.labels for lab in row}
    assert kinds == {"finite", "table"}
    assert g.counts()["table"] == 4


def test_scan_rows_top_down():
    g = scan_classify(TABLES["square"], (0, 0, 1, 4), (1, 4), 100)
    assert g.cell_center(0, 0) == Point(H, Fraction(7, 2))
    assert g.labels[-1] == [("table",)]


def test_scan_pgm_and_workers():
    win = (-3, -3, 4, 4)
    a = scan_classify(TABLES["square"], win, (14, 10), 1000, workers=1)
    b = scan_classify(TABLES["square"], win, (14, 10), 1000, workers=3)
    assert a.labels == b.labels and a.to_pgm() == b.to_pgm()
    assert a.to_pgm().startswith(b"P5\n14 10\n255\n") and len(a.to_pgm()) == len(b"P5\n14 10\n255\n") + 140


def test_scan_rejects_empty_window():
    with pytest.raises(ValueError):
        scan_classify(TABLES["square"], (1, 0, 1, 2), (2, 2))


# -- properties ---------------------------------------------------------------------------


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(TABLE_NAMES), st.integers(0, 10**6))
def test_component_is_stable_and_uniform(name, seed):
    t = TABLES[name]
    rng = random.Random(seed)
    x = random_outside_point(t, rng)
    res = orbit(t, x, 2000)
    if not res.is_periodic or res.period > 300:
        return
    comp = component_of(t, x, res=res)
    poly = comp.region
    assert _motion(t, comp.itinerary)(poly) == poly
    if poly.degenerate:
        return
    # nine-point stencil: centroid, vertex-centroid midpoints and random interior points
    c = poly.centroid()
    stencil = [(c + v).scale(H) for v in poly.vertices][:4] + [interior_sample(poly, rng) for _ in range(4)]
    stencil.append(c)
    for p in stencil:
        r = orbit(t, p, 2 * comp.period)
        assert r.is_periodic and comp.period % r.period == 0
        assert r.itinerary == comp.itinerary[: r.period]
        if r.period != comp.period:
            assert comp.center_special or p == c


def test_partition_tiles_base(rocket):
    part = return_partition(rocket.table, list(rocket.sub_rockets["A_ср"].parts), 200)
    total = sum((p.region.area() for p in part.pieces), ZERO)
    assert not part.unresolved and total == rocket.sub_rockets["A_ср"].area()
    for p in part.pieces:
        assert p.side_count == sum(len(c) for c in p.region.outline)


def test_square_neighbours_have_distinct_periods():
    sq = TABLES["square"]
    for a in range(-4, 5):
        for b in range(-4, 5):
            for da, db in ((1, 0), (0, 1)):
                p, q = Point(a + H, b + H), Point(a + da + H, b + db + H)
                if contains(sq.polygon, p) is not Location.EXTERIOR or contains(sq.polygon, q) is not Location.EXTERIOR:
                    continue
                assert orbit(sq, p, 200).period != orbit(sq, q, 200).period


@pytest.mark.parametrize("name", TABLE_NAMES)
def test_invariant_suite(name):
    fails = check_invariants(TABLES[name], samples=10, seed=7)
    assert all(not v for v in fails.values()), fails
