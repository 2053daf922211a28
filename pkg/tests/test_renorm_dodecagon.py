import pytest

from outer_billiards.billiard import make_table
from outer_billiards.exactfield import SQRT3, QuadExt, approx
from outer_billiards.geometry import Location
from outer_billiards.renorm_dodecagon import (
    GOLDEN_TABLES,
    LAMBDA,
    TARGET_ALIASES,
    ZONE_ANGLES,
    GrowthViolation,
    RocketSystemError,
    build_rocket_system,
    check_figure_shapes,
    locate_seed_components,
    period_growth_witness,
    period_under_return_map,
    rocket_partition,
    rocket_return_table,
    verify_hypothesis1,
    verify_scaling_conjugacy,
)


def golden_rows(name):
    sides, times = GOLDEN_TABLES[name]
    return list(zip(sides, times))


def test_five_zones_with_decreasing_rotations(rocket):
    assert len(rocket.zones) == 5
    assert tuple(z.angle for z in rocket.zones) == ZONE_ANGLES


def test_zones_tile_the_rocket(rocket):
    total = sum((z.region.area() for z in rocket.zones), QuadExt(0))
    assert total == rocket.rocket.area()


def test_zone_shapes(rocket):
    assert len(rocket.zones[0].region.as_convex()) == 3
    for z in rocket.zones[1:4]:
        assert len(z.region.as_convex()) == 4
    assert not rocket.zones[4].region.is_convex()


def test_contraction_ratio(rocket):
    assert rocket.lam == LAMBDA == 7 - 4 * SQRT3
    assert rocket.lam * (7 + 4 * SQRT3) == 1
    assert approx(rocket.lam, 3) == "0.072"
    assert rocket.middle_ratio == 2 * SQRT3 - 3


def test_homotheties_fix_the_apex(rocket):
    assert rocket.gamma(rocket.apex) == rocket.apex
    assert rocket.middle(rocket.apex) == rocket.apex


def test_figure_shapes(rocket):
    assert check_figure_shapes(rocket.figures) == {
        "zone0_regular_dodecagon": True,
        "zone1_hexagon_90_150": True,
        "zone2_octagon_150_120": True,
        "zone3_regular_dodecagon": True,
    }


def test_zone_rotation_preserves_its_figure(rocket):
    for z, fig in zip(rocket.zones, rocket.figures):
        assert z.motion(fig).same_set(fig)


def test_gamma_sends_necklace_to_zone0_figure(rocket):
    assert rocket.gamma(rocket.necklace).same_set(rocket.figures[0])
    assert rocket.middle(rocket.necklace).same_set(rocket.figures[3])


def test_small_middle_rocket_is_gamma_of_middle(rocket):
    subs = rocket.sub_rockets
    assert rocket.gamma(subs["A_ср"]).same_set(subs["A_мал_ср"])
    assert rocket.gamma_x(subs["A_ср"]).same_set(subs["X"])


def test_x_lies_strictly_inside_middle_rocket(rocket):
    big = rocket.sub_rockets["A_ср"]
    for part in rocket.sub_rockets["X"].parts:
        assert all(big.contains(v) is Location.INTERIOR for v in part.vertices)


def test_aliases_resolve(rocket):
    for alias, name in TARGET_ALIASES.items():
        assert rocket.domain(alias) is rocket.sub_rockets[name]


def test_non_dodecagon_rejected():
    with pytest.raises(RocketSystemError):
        build_rocket_system(make_table("octagon"))


def test_unknown_domain(rocket):
    with pytest.raises(KeyError):
        rocket_partition(rocket, "nowhere")


@pytest.mark.parametrize("name", ["A_ср", "самолётик_большой", "A_мал", "зона0"])
def test_fast_golden_tables(rocket, name):
    assert rocket_return_table(rocket, name) == golden_rows(name)


def test_alias_gives_same_table(rocket):
    assert rocket_return_table(rocket, "middle") == golden_rows("A_ср")


def test_tiny_budget_reports_unresolved(rocket):
    with pytest.raises(RocketSystemError):
        rocket_return_table(rocket, "A_ср", budget=5)


def test_partition_covers_domain(rocket):
    part = rocket_partition(rocket, "A_ср")
    area = sum((p.region.area() for p in part.pieces), QuadExt(0))
    assert area == rocket.sub_rockets["A_ср"].area()


def test_scaling_conjugacy_small_sample(rocket):
    rep = verify_scaling_conjugacy(rocket, samples=12, seed=3)
    assert rep.matched
    assert rep.max_defect == 0
    assert len(rep.samples) == 12
    assert rep.to_json()["matched"] is True


def test_hypothesis1_small_sample(rocket):
    rep = verify_hypothesis1(rocket, samples=12, seed=5)
    assert rep.matched
    assert rep.extra["x_times_match_table"]
    assert all(small >= 2 for _, small in rep.return_times)


@pytest.fixture(scope="module")
def seeds(rocket):
    return locate_seed_components(rocket)


def test_seed_components(seeds):
    assert [len(c) for c in seeds] == [8, 6, 12]
    areas = [c.area() for c in seeds]
    assert areas == sorted(areas, reverse=True)


def test_short_growth_chain(rocket, seeds):
    w = period_growth_witness(rocket, n_max=4, seeds=seeds)
    per = [l.period for l in w.links]
    assert len(per) == 5
    for n in range(len(per) - 3):
        assert per[n + 3] >= 2 * per[n]
    assert all(l.unfolded_period > 0 for l in w.links)
    assert w.boxes[0].contains(w.limit) is Location.INTERIOR


def test_period_routes_agree_on_seed(rocket, seeds):
    part = rocket_partition(rocket, "A_ср")
    c = seeds[0]
    p = (c.centroid() + c.vertices[0]).scale(QuadExt(1) / 2)
    assert period_under_return_map(rocket, part, p) == 4


def test_growth_needs_three_seeds(rocket):
    with pytest.raises(ValueError):
        period_growth_witness(rocket, n_max=2)


def test_growth_violation_is_assertion():
    assert issubclass(GrowthViolation, AssertionError)
