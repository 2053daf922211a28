import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from outer_billiards.billiard import (
    TABLE_NAMES,
    Folding,
    OutsideError,
    UndefinedOnRay,
    folded_step,
    make_table,
    orbit,
    orbit_dump,
    step,
    step_back,
    tangent_vertex,
)
from outer_billiards.exactfield import QuadExt, SQRT2, SQRT3
from outer_billiards.geometry import Point
from outer_billiards.structure import random_outside_point

H = Fraction(1, 2)
TABLES = {name: make_table(name) for name in TABLE_NAMES}


def test_square_vertices():
    assert TABLES["square"].vertices == (Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1))


def test_regular_tables_in_their_fields():
    assert Point(1, 0) in TABLES["octagon"].vertices
    assert Point(SQRT2 / 2, SQRT2 / 2) in TABLES["octagon"].vertices
    assert Point(SQRT3 / 2, QuadExt(H)) in TABLES["dodecagon"].vertices
    for name in TABLE_NAMES:
        TABLES[name].validate()


def test_lattice_representatives():
    assert TABLES["triangle_lattice"].vertices == (Point(0, 0), Point(1, 0), Point(0, 1))
    assert len(TABLES["hexagon_lattice"].vertices) == 6


def test_tangent_vertex_examples():
    sq = TABLES["square"]
    assert sq.vertices[tangent_vertex(sq, Point(H, Fraction(3, 2)))] == Point(0, 1)
    with pytest.raises(UndefinedOnRay):
        tangent_vertex(sq, Point(-1, 0))
    oc = TABLES["octagon"]
    assert oc.vertices[tangent_vertex(oc, Point(3, 0))] == Point(0, 1)


def test_inside_rejected():
    with pytest.raises(OutsideError):
        tangent_vertex(TABLES["square"], Point(H, H))
    with pytest.raises(OutsideError):
        orbit(TABLES["square"], Point(1, H))


def test_step_examples():
    sq = TABLES["square"]
    assert step(sq, Point(H, Fraction(3, 2))) == Point(-H, H)
    assert step_back(sq, step(sq, Point(H, Fraction(3, 2)))) == Point(H, Fraction(3, 2))
    assert step(TABLES["octagon"], Point(3, 0)) == Point(-3, 2)


def test_orbit_examples():
    sq = TABLES["square"]
    res = orbit(sq, Point(H, Fraction(3, 2)), 100)
    assert res.label() == "Periodic(4)"
    assert [sq.vertices[i] for i in res.itinerary] == [Point(0, 1), Point(0, 0), Point(1, 0), Point(1, 1)]
    assert orbit(sq, Point(-1, 0), 10).label() == "Finite(0)"
    # (2, 0) is reflected through (1, 1) first and lands on the extension of the left side
    assert orbit(sq, Point(2, 0), 10).label() == "Finite(1)"
    assert orbit(sq, Point(Fraction(3, 2), Fraction(3, 2)), 100).label() == "Periodic(8)"
    # ring d = 3 under the all-left convention
    assert orbit(sq, Point(Fraction(3, 2), Fraction(5, 2)), 100).label() == "Periodic(12)"


def test_orbit_budget():
    res = orbit(TABLES["square"], Point(Fraction(1, 2), Fraction(101, 2)), 10)
    assert res.outcome == "budget" and res.label() == "BudgetExceeded(10)"
    with pytest.raises(ValueError):
        orbit(TABLES["square"], Point(5, 5), 0)


def test_orbit_dump_lines():
    import json

    res = orbit(TABLES["square"], Point(H, Fraction(3, 2)), 100, keep_points=True)
    lines = [json.loads(l) for l in orbit_dump(res, Point(H, Fraction(3, 2))).splitlines()]
    assert len(lines) == 6
    assert lines[1]["index"] == 1 and lines[1]["vertex"] == 3
    assert lines[-1] == {"outcome": "periodic", "steps": 4}


def test_folded_step_stays_in_sector():
    t = TABLES["dodecagon"]
    f = Folding(t)
    rng = random.Random(3)
    for _ in range(50):
        x = random_outside_point(t, rng)
        try:
            k, y = folded_step(t, x, f)
        except UndefinedOnRay:
            continue
        assert f.sector_of(y) == 0
        assert t.rotation(k)(y) == step(t, x)


def test_octagon_folding_uses_45_degrees():
    t = TABLES["octagon"]
    assert t.rotation(1)(t.vertices[0]) == t.vertices[1]
    assert t.rotation(1).angle == 45


def test_folded_fixed_point_unfolds_to_one_point_per_sector():
    from outer_billiards.geometry import Isometry

    t = TABLES["octagon"]
    f = Folding(t)
    found = 0
    # candidate fixed points: centres of x -> R^-k (2 A_i - x)
    for i in range(t.n):
        for k in range(t.n):
            motion = t.rotation(-k).compose(Isometry.point_reflection(t.vertices[i]))
            if motion.angle == 0:
                continue
            c = motion.fixed_point()
            try:
                if f.sector_of(c) != 0 or tangent_vertex(t, c) != i:
                    continue
                kk, y = folded_step(t, c, f)
            except (UndefinedOnRay, OutsideError, ValueError):
                continue
            assert y == c and kk == k
            res = orbit(t, c, 100, keep_points=True)
            sectors = [f.sector_of(p) for p in res.points[:-1]]
            assert len(set(sectors)) == len(sectors) == res.period
            found += 1
    assert found >= 1


# -- properties ------------------------------------------------------------------------

table_names = st.sampled_from(TABLE_NAMES)


@settings(max_examples=60, deadline=None)
@given(table_names, st.integers(0, 10**6))
def test_step_back_inverts_step(name, seed):
    t = TABLES[name]
    x = random_outside_point(t, random.Random(seed))
    try:
        y = step(t, x)
    except UndefinedOnRay:
        return
    assert step_back(t, y) == x
    try:
        z = step_back(t, x)
    except UndefinedOnRay:
        return
    assert step(t, z) == x


@settings(max_examples=40, deadline=None)
@given(table_names, st.integers(0, 10**6))
def test_type_is_invariant_under_step(name, seed):
    t = TABLES[name]
    x = random_outside_point(t, random.Random(seed))
    res = orbit(t, x, 3000)
    try:
        y = step(t, x)
    except UndefinedOnRay:
        assert res.label() == "Finite(0)"
        return
    res2 = orbit(t, y, 3000)
    if res.outcome == "periodic":
        assert res2.label() == res.label()
        assert res2.itinerary == res.itinerary[1:] + res.itinerary[:1]
    elif res.outcome == "finite":
        assert res2.label() == f"Finite({res.steps - 1})"


@settings(max_examples=40, deadline=None)
@given(table_names, st.integers(0, 10**6))
def test_double_step_is_translation(name, seed):
    t = TABLES[name]
    rng = random.Random(seed)
    x = random_outside_point(t, rng)
    try:
        i = tangent_vertex(t, x)
        y = step(t, x)
        j = tangent_vertex(t, y)
    except UndefinedOnRay:
        return
    shift = step(t, y) - x
    assert i != j
    assert shift == (t.vertices[j] - t.vertices[i]).scale(2)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["square", "octagon", "dodecagon"]), st.integers(0, 10**6), st.integers(1, 11))
def test_rotation_equivariance(name, seed, k):
    t = TABLES[name]
    k %= t.n
    x = random_outside_point(t, random.Random(seed))
    rot = t.rotation(k)
    a, b = orbit(t, x, 2000), orbit(t, rot(x), 2000)
    assert (a.outcome, a.steps) == (b.outcome, b.steps)
    assert b.itinerary == tuple((i + k) % t.n for i in a.itinerary)


@settings(max_examples=40, deadline=None)
@given(table_names, st.integers(0, 10**6))
def test_periodic_means_exact_return(name, seed):
    t = TABLES[name]
    x = random_outside_point(t, random.Random(seed))
    res = orbit(t, x, 3000, keep_points=True)
    if res.outcome == "periodic":
        assert res.points[-1] == x
        assert x not in res.points[1:-1]
    if res.outcome == "finite":
        with pytest.raises(UndefinedOnRay):
            tangent_vertex(t, res.points[-1])
