import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from outer_billiards.exactfield import ZERO
from outer_billiards.geometry import Isometry, Location, Point, interior_sample
from outer_billiards.renorm_octagon import (
    INFINITE_RANK,
    LETTERS,
    PRINTED_MATRIX,
    PRINTED_RANK0_PERIODS,
    ROTATION_ANGLES,
    VERIFIED_WORDS,
    CountVector,
    aperiodic_witness,
    closed_form,
    conjugacy_check,
    count_matrix,
    count_step,
    derive_substitution,
    discrepancy_report,
    eigen_decomposition,
    folded_apply,
    substituted_cycle_check,
    matrix_power,
    octagon_census,
    rank,
    rank0_orbits,
    simulated_period,
    substitute,
    substitution,
)
from outer_billiards.structure import BoundaryPoint


def test_three_pieces_with_rotations(sector):
    assert set(sector.pieces) == set(LETTERS)
    for name, (reg, mot) in sector.pieces.items():
        assert mot.angle == ROTATION_ANGLES[name]
        centre = sector.centers[name.upper()]
        assert mot(centre) == centre


def test_pieces_tile_domain(sector):
    assert sum((reg.area() for reg, _ in sector.pieces.values()), ZERO) == sector.domain.area()
    u, v, w = (sector.pieces[k][0] for k in LETTERS)
    assert (u.side_count, v.side_count, w.side_count) == (3, 4, 3)
    c = sector.corners
    assert set(u.vertices) == {c["O"], c["P"], c["Q"]}
    assert set(v.vertices) == {c["K"], c["P"], c["Q"], c["R"]}
    assert set(w.vertices) == {c["L"], c["R"], c["M"]}


def test_gamma_contracts_into_domain(sector):
    assert sector.gamma(sector.corners["O"]) == sector.corners["O"]
    img = sector.gamma(sector.domain)
    assert all(sector.domain.contains(v) is not Location.EXTERIOR for v in img.vertices)
    assert sector.gamma.a < 1 and sector.gamma.b == 0


def test_folded_apply_examples(sector):
    reg, mot = sector.pieces["u"]
    x = interior_sample(reg, random.Random(1))
    assert folded_apply(sector, x) == ("u", Isometry.rotation(135, sector.centers["U"])(x))
    V = sector.centers["V"]
    assert folded_apply(sector, V) == ("v", V)
    c = sector.corners
    with pytest.raises(BoundaryPoint):
        folded_apply(sector, (c["P"] + c["Q"]).scale(Fraction(1, 2)))


def test_rank_examples(sector):
    L = sector.corners["L"]
    assert rank(sector, L) == 0
    y = sector.centers["V"]
    assert rank(sector, y) == 0
    assert rank(sector, sector.gamma(y)) == 1
    assert rank(sector, sector.gamma(sector.gamma(y))) == 2
    assert rank(sector, sector.corners["O"]) is INFINITE_RANK


def test_frozen_words_rederived(sector):
    assert derive_substitution(sector, samples=10, seed=5) == VERIFIED_WORDS
    assert sector.substitution == VERIFIED_WORDS
    assert substitution("w") == ("u", "u", "u")
    assert [len(substitution(l)) for l in LETTERS] == [15, 9, 3]


def test_substitute_concatenates():
    assert substitute(("w", "w")) == ("u",) * 6


def test_count_matrix(sector):
    assert sector.matrix == PRINTED_MATRIX
    m = count_matrix(VERIFIED_WORDS)
    for j, letter in enumerate(LETTERS):
        assert sum(m[i][j] for i in range(3)) == len(VERIFIED_WORDS[letter])


def test_count_step_examples():
    assert count_step(CountVector(0, 1, 0)).total == 9
    assert count_step(CountVector(0, 0, 0)) == CountVector(0, 0, 0)


def test_eigenvalues(sector):
    assert sorted(lam for lam, _ in eigen_decomposition(sector.matrix)) == [-3, 1, 9]


@given(st.integers(0, 20), st.integers(0, 20), st.integers(0, 20), st.integers(0, 8))
def test_closed_form_equals_iteration(a, b, c, k):
    cv = CountVector(a, b, c)
    it = cv
    for _ in range(k):
        it = count_step(it)
    assert closed_form(cv, k) == it
    m = matrix_power(PRINTED_MATRIX, k)
    assert it.as_tuple() == tuple(sum(m[i][j] * v for j, v in enumerate(cv.as_tuple())) for i in range(3))


def test_closed_form_identity():
    assert closed_form(CountVector(3, 1, 4), 0) == CountVector(3, 1, 4)


def test_rank0_orbits(sector):
    orbits = {o.name: o for o in rank0_orbits(sector)}
    assert set(orbits) == set(PRINTED_RANK0_PERIODS)
    assert orbits["V"].word == ("v",) and orbits["V"].counts == CountVector(0, 1, 0)
    assert orbits["V-neighbourhood"].word == ("v",) * 4 and orbits["V-neighbourhood"].period(0) == 4
    assert orbits["U-neighbourhood"].counts == CountVector(8, 0, 0)


@pytest.mark.parametrize("name", list(PRINTED_RANK0_PERIODS))
def test_rank0_periods_by_simulation(sector, name):
    orb = next(o for o in rank0_orbits(sector) if o.name == name)
    coef9, coef3 = PRINTED_RANK0_PERIODS[name][2]
    for n in (0, 1):
        printed = coef9 * 9**n + coef3 * (-3) ** n
        assert simulated_period(sector, orb.seed, n) == orb.period(n) == printed


def test_substituted_cycles_match_simulation(sector):
    assert all(ok for _, ok in substituted_cycle_check(sector))


def test_conjugacy_on_samples(sector):
    assert conjugacy_check(sector, samples=100, seed=11) == {"u": 100, "v": 100, "w": 100}


@pytest.mark.parametrize("n, expected", [(0, 4), (1, 36)])
def test_octagon_count(sector, n, expected):
    rep = octagon_census(sector, n, grid=16)
    assert rep["octagons"] == expected == rep["expected"]
    assert rep["missed"] == 0 and rep["sampled"] > 0


def test_discrepancy_report(sector):
    rep = discrepancy_report(sector)
    assert not rep["word_u"] and not rep["word_v"] and rep["word_w"]
    assert rep["k_u"] and rep["k_v"] and rep["k_w"]
    assert rep["matrix"] and rep["eigenvalues"]
    assert not rep["printed_words_vs_printed_matrix"]
    assert not any(v for k, v in rep.items() if k.startswith("closed_form_"))
    assert rep["total_a0"] and rep["total_b0"] and not rep["total_c0"]
    assert all(v for k, v in rep.items() if k.startswith("rank0_"))


def test_witness_depth_one(sector):
    w = aperiodic_witness(sector, 1)
    periods = [l.period for l in w.links]
    assert len(periods) == 3 == len(set(periods))
    assert periods == sorted(periods)
    assert w.boxes[0].contains(w.limit) is Location.INTERIOR
    with pytest.raises(ValueError):
        aperiodic_witness(sector, 0)
