"""Renormalization of outer billiards around the regular octagon.

The first invariant ring of the octagon, folded by the 45 degree rotation
group, is the arrowhead quadrilateral OKLM.  On it the folded map is a
piecewise rotation with three pieces:

* ``u``: triangle OPQ, rotation by 135 degrees about U,
* ``v``: quadrilateral KPQR, rotation by 90 degrees about V,
* ``w``: triangle LRM, rotation by 45 degrees about W.

A homothety ``gamma`` centred at O maps OKLM into itself and conjugates the
folded map to its first return to the image, which turns into a substitution
on the letters u, v, w.  Everything here is derived from the table by exact
construction; hard-coded data below is either a frozen derivation (checked
against a fresh one in the tests) or printed data kept as a checksum.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .billiard import BilliardTable, make_table
from .exactfield import ONE, ZERO, QuadExt
from .geometry import (
    ConvexPolygon,
    Isometry,
    Location,
    Point,
    Region,
    Similitude,
    interior_sample,
    intersect,
    orient,
)
from .structure import (
    BoundaryPoint,
    PiecewiseMap,
    component_of,
    folded_pieces,
    invariant_figure,
    pinwheel_domain,
)

__all__ = [
    "LETTERS",
    "ROTATION_ANGLES",
    "VERIFIED_WORDS",
    "INFINITE_RANK",
    "SectorSystemError",
    "SubstitutionError",
    "SectorSystem",
    "CountVector",
    "build_sector_system",
    "folded_apply",
    "rank",
    "derive_substitution",
    "substitution",
    "substitute",
    "count_matrix",
    "count_step",
    "matrix_power",
    "eigen_decomposition",
    "closed_form",
    "total_coefficients",
    "Rank0Orbit",
    "rank0_orbits",
    "simulated_period",
    "conjugacy_check",
    "substituted_cycle_check",
    "rank_octagons",
    "octagon_census",
    "discrepancy_report",
    "WitnessLink",
    "Witness",
    "aperiodic_witness",
]

LETTERS = ("u", "v", "w")
ROTATION_ANGLES = {"u": 135, "v": 90, "w": 45}

# Words of the substitution, as produced by derive_substitution on the
# octagon table (gamma x tracked under the folded map until it re-enters
# gamma(OKLM)).  The tests re-derive them.
VERIFIED_WORDS = {
    "u": tuple("uvvwvwvwvwvwvvu"),
    "v": tuple("uvvwvwvvu"),
    "w": tuple("uuu"),
}

# Printed data used only as a checksum in discrepancy_report.
PRINTED_WORDS = {
    "u": tuple("uvvwwvwwvwwvuu"),
    "v": tuple("uvvwwvwwvuu"),
    "w": tuple("uuu"),
}
PRINTED_K = {"u": 15, "v": 9, "w": 3}
PRINTED_MATRIX = ((2, 2, 3), (8, 5, 0), (5, 2, 0))
PRINTED_EIGENVALUES = (9, -3, 1)
# per output component, per input component: coefficients of (1, (-3)^k, 9^k)
PRINTED_CLOSED_FORM = (
    ((1, 4, 3), (-2, 0, 2), (3, -4, 1)),
    ((-2, -4, 6), (4, 0, 4), (-6, 4, 2)),
    ((1, -4, 3), (-2, 0, 2), (3, 4, 1)),
)
# total period per input component: coefficients of (9^n, (-3)^n)
PRINTED_TOTAL = (
    (Fraction(3, 2), Fraction(-1, 2)),
    (Fraction(1), Fraction(0)),
    (Fraction(3, 2), Fraction(1, 2)),
)
# Table of rank-0 orbits: seed name -> (word, counts, (coef of 9^n, coef of (-3)^n))
PRINTED_RANK0_PERIODS = {
    "V": ("v", (0, 1, 0), (Fraction(1), Fraction(0))),
    "V-neighbourhood": ("vvvv", (0, 4, 0), (Fraction(4), Fraction(0))),
    "U": ("u", (1, 0, 0), (Fraction(3, 2), Fraction(-1, 2))),
    "U-neighbourhood": ("uuuuuuuu", (8, 0, 0), (Fraction(12), Fraction(-4))),
    "W1": ("vw", (0, 1, 1), (Fraction(3, 2), Fraction(1, 2))),
    "W1-neighbourhood": ("vw" * 8, (0, 8, 8), (Fraction(12), Fraction(4))),
}

INFINITE_RANK = math.inf


class SectorSystemError(ValueError):
    """A validation of the folded sector system failed."""

    def __init__(self, check: str, detail: str = ""):
        super().__init__(f"{check}: {detail}" if detail else check)
        self.check = check


class SubstitutionError(ValueError):
    """Derived words disagree between samples or with the count matrix."""


@dataclass(frozen=True)
class CountVector:
    a: int
    b: int
    c: int

    @property
    def total(self) -> int:
        return self.a + self.b + self.c

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)

    @classmethod
    def of_word(cls, word: Sequence[str]) -> "CountVector":
        return cls(word.count("u"), word.count("v"), word.count("w"))


@dataclass
class SectorSystem:
    table: BilliardTable
    domain: Region
    corners: dict[str, Point]
    pieces: dict[str, tuple[Region, Isometry]]
    centers: dict[str, Point]
    gamma: Similitude
    map: PiecewiseMap = field(repr=False)
    invariant_octagons: dict[str, ConvexPolygon] = field(repr=False)

    @cached_property
    def gamma_domain(self) -> Region:
        return self.gamma(self.domain)

    @cached_property
    def substitution(self) -> dict[str, tuple[str, ...]]:
        return derive_substitution(self)

    @cached_property
    def matrix(self) -> tuple[tuple[int, ...], ...]:
        return count_matrix(self.substitution)


def _convex_piece(reg: Region, name: str) -> ConvexPolygon:
    try:
        return reg.as_convex()
    except ValueError:
        raise SectorSystemError("piece shape", f"piece {name} is not convex") from None


def build_sector_system(t: BilliardTable | None = None) -> SectorSystem:
    """Fold the first invariant ring and extract the three-piece rotation system."""
    t = t or make_table("octagon")
    if t.n != 8:
        raise SectorSystemError("table", "the sector system is built for the octagon")
    parts = pinwheel_domain(t)
    domain = Region(parts)
    fps = folded_pieces(t, parts)
    if len(fps) != 3:
        raise SectorSystemError("piece count", f"expected 3 pieces, found {len(fps)}")
    by_angle = {fp.angle: fp for fp in fps}
    letter_of = {ang: name for name, ang in ROTATION_ANGLES.items()}
    if set(by_angle) != set(letter_of):
        raise SectorSystemError("rotation angles", f"found {sorted(by_angle)}")
    pieces = {}
    centers = {}
    for ang, fp in by_angle.items():
        name = letter_of[ang]
        pieces[name] = (fp.region, fp.motion)
        centers[name.upper()] = fp.center
    total = sum((reg.area() for reg, _ in pieces.values()), ZERO)
    if total != domain.area():
        raise SectorSystemError("tiling", "piece areas do not add up to the domain")
    for name, (reg, mot) in pieces.items():
        if mot(centers[name.upper()]) != centers[name.upper()]:
            raise SectorSystemError("fixed point", f"centre of {name} is not fixed")

    # corners: the outline of the domain read counterclockwise from the tip A_0
    cyc = domain.outline
    if len(cyc) != 1 or len(cyc[0]) != 4:
        raise SectorSystemError("domain shape", "expected a quadrilateral")
    o = t.vertices[0]
    c = list(cyc[0])
    i = c.index(o)
    c = c[i:] + c[:i]
    corners = dict(zip("OKLM", c))
    tri_u = _convex_piece(pieces["u"][0], "u")
    tri_w = _convex_piece(pieces["w"][0], "w")
    quad_v = _convex_piece(pieces["v"][0], "v")
    O, K, L, M = c
    try:
        P = next(p for p in tri_u.vertices if p != O and orient(O, K, p) == 0)
        Q = next(p for p in tri_u.vertices if p != O and orient(O, M, p) == 0)
        R = next(p for p in tri_w.vertices if p not in (L, M))
    except StopIteration:
        raise SectorSystemError("piece corners", "pieces do not meet the sides as expected") from None
    corners.update(P=P, Q=Q, R=R)
    if len(tri_u) != 3 or len(tri_w) != 3 or set(quad_v.vertices) != {K, P, Q, R}:
        raise SectorSystemError("piece shape", "expected triangles OPQ, LRM and quadrilateral KPQR")
    if set(tri_w.vertices) != {L, M, R}:
        raise SectorSystemError("piece shape", "w is not the triangle LRM")

    # W lies outside its piece (it is the centre of the necklace), so only
    # u and v carry an octagon around their centre
    octs = {}
    for name in ("u", "v"):
        reg, mot = pieces[name]
        fig = invariant_figure(_convex_piece(reg, name), mot)
        if fig is None:
            raise SectorSystemError("invariant figure", f"piece {name} has none")
        octs[name.upper()] = fig

    pm = PiecewiseMap([(name, reg, mot) for name, (reg, mot) in sorted(pieces.items())])
    gamma = _derive_gamma(O, L, octs["U"], pm, pieces, domain)
    return SectorSystem(t, domain, corners, pieces, centers, gamma, pm, octs)


def _derive_gamma(O, L, u_octagon, pm, pieces, domain) -> Similitude:
    """The homothety at O sending L to the corner of the U-octagon facing O.

    Checked for containment and for the conjugacy on a few exact samples.
    """
    near = min(u_octagon.vertices, key=lambda p: (p - O).dot(p - O))
    if orient(O, L, near) != 0:
        raise SectorSystemError("gamma", "U-octagon corner is off the axis OL")
    k = (near - O).dot(L - O) / (L - O).dot(L - O)
    gamma = Similitude.homothety(O, k)
    img = gamma(domain)
    if any(domain.contains(v) is Location.EXTERIOR for v in img.vertices):
        raise SectorSystemError("gamma", "gamma(OKLM) is not inside OKLM")
    rng = random.Random(0)
    for name, (reg, mot) in sorted(pieces.items()):
        for _ in range(3):
            x = interior_sample(reg, rng)
            _, y = pm.first_return(gamma(x), img, 10_000)
            if y != gamma(mot(x)):
                raise SectorSystemError("gamma", "conjugacy fails at a sample point")
    return gamma


def folded_apply(sys: SectorSystem, x: Point) -> tuple[str, Point]:
    """One step of the folded map; raises BoundaryPoint on piece boundaries."""
    return sys.map.apply(x)


def rank(sys: SectorSystem, x: Point):
    """Largest ``n`` with ``gamma^-n x`` still in OKLM; INFINITE_RANK at the centre O."""
    if sys.domain.contains(x) is Location.EXTERIOR:
        raise ValueError(f"{x!r} is not in the sector domain")
    inv = sys.gamma.inverse()
    if x == sys.corners["O"]:
        return INFINITE_RANK
    n = 0
    y = inv(x)
    while sys.domain.contains(y) is not Location.EXTERIOR:
        n += 1
        y = inv(y)
    return n


def derive_substitution(sys: SectorSystem, samples: int = 20, seed: int = 0) -> dict[str, tuple[str, ...]]:
    """Track ``gamma x`` under the folded map until it re-enters ``gamma(OKLM)``.

    The word of pieces visited is the same for every sample of one piece;
    the landing point must be ``gamma`` of the one-step image.
    """
    rng = random.Random(seed)
    out = {}
    for name in LETTERS:
        reg, mot = sys.pieces[name]
        words = set()
        for _ in range(samples):
            x = interior_sample(reg, rng)
            word, y = sys.map.first_return(sys.gamma(x), sys.gamma_domain, 100_000)
            if y != sys.gamma(mot(x)):
                raise SubstitutionError(f"conjugacy fails for a sample of piece {name}")
            words.add(tuple(word))
        if len(words) != 1:
            raise SubstitutionError(f"piece {name} produces several words: {sorted(words)}")
        out[name] = words.pop()
    m = count_matrix(out)
    for j, name in enumerate(LETTERS):
        if sum(m[i][j] for i in range(3)) != len(out[name]):
            raise SubstitutionError("count matrix columns disagree with word lengths")
    return out


def substitution(letter: str, words: dict | None = None) -> tuple[str, ...]:
    return (words or VERIFIED_WORDS)[letter]


def substitute(word: Sequence[str], words: dict | None = None) -> tuple[str, ...]:
    words = words or VERIFIED_WORDS
    out: list[str] = []
    for letter in word:
        out.extend(words[letter])
    return tuple(out)


# -- counting ------------------------------------------------------------------


def count_matrix(words: dict | None = None) -> tuple[tuple[int, ...], ...]:
    """``m[i][j]`` = number of letter ``i`` in the word of letter ``j``."""
    words = words or VERIFIED_WORDS
    return tuple(tuple(words[lj].count(li) for lj in LETTERS) for li in LETTERS)


def _mat_vec(m, v):
    return tuple(sum(m[i][j] * v[j] for j in range(len(v))) for i in range(len(m)))


def _mat_mul(a, b):
    n = len(a)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n))


def count_step(cv: CountVector, matrix=None) -> CountVector:
    return CountVector(*_mat_vec(matrix or count_matrix(), cv.as_tuple()))


def matrix_power(m, k: int):
    n = len(m)
    out = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    for _ in range(k):
        out = _mat_mul(m, out)
    return out


def _char_poly(m) -> list[Fraction]:
    """Coefficients of ``det(x I - m)`` for a 3x3 matrix, highest degree first."""
    (a, b, c), (d, e, f), (g, h, i) = m
    tr = a + e + i
    minors = (e * i - f * h) + (a * i - c * g) + (a * e - b * d)
    det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    return [Fraction(1), Fraction(-tr), Fraction(minors), Fraction(-det)]


def _integer_roots(poly: list[Fraction]) -> list[int]:
    const = abs(int(poly[-1]))
    cands = {0} if const == 0 else {s * d for d in range(1, const + 1) if const % d == 0 for s in (1, -1)}
    roots = []
    for r in sorted(cands, key=lambda r: (-abs(r), -r)):
        if sum(cf * r ** (len(poly) - 1 - k) for k, cf in enumerate(poly)) == 0:
            roots.append(r)
    return roots


def _null_vector(m) -> list[Fraction]:
    """A nonzero kernel vector of a singular 3x3 rational matrix (Gaussian elimination)."""
    rows = [[Fraction(x) for x in r] for r in m]
    n = len(rows)
    pivots = []
    r = 0
    for col in range(n):
        p = next((k for k in range(r, n) if rows[k][col] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        rows[r] = [x / rows[r][col] for x in rows[r]]
        for k in range(n):
            if k != r and rows[k][col] != 0:
                f = rows[k][col]
                rows[k] = [x - f * y for x, y in zip(rows[k], rows[r])]
        pivots.append(col)
        r += 1
    free = next(col for col in range(n) if col not in pivots)
    v = [Fraction(0)] * n
    v[free] = Fraction(1)
    for k, col in enumerate(pivots):
        v[col] = -rows[k][free]
    return v


def _inverse(m) -> list[list[Fraction]]:
    n = len(m)
    aug = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(m)]
    for col in range(n):
        p = next(k for k in range(col, n) if aug[k][col] != 0)
        aug[col], aug[p] = aug[p], aug[col]
        aug[col] = [x / aug[col][col] for x in aug[col]]
        for k in range(n):
            if k != col and aug[k][col] != 0:
                f = aug[k][col]
                aug[k] = [x - f * y for x, y in zip(aug[k], aug[col])]
    return [r[n:] for r in aug]


def eigen_decomposition(matrix=None):
    """Eigenvalues and exact spectral projectors of a diagonalisable integer 3x3 matrix.

    Returns ``[(eigenvalue, projector)]`` with ``m^k = sum eigenvalue^k * projector``.
    """
    m = matrix or count_matrix()
    roots = _integer_roots(_char_poly(m))
    if len(roots) != 3:
        raise SubstitutionError(f"count matrix is not diagonalisable over the integers (roots {roots})")
    vecs = []
    for lam in roots:
        shifted = [[m[i][j] - (lam if i == j else 0) for j in range(3)] for i in range(3)]
        vecs.append(_null_vector(shifted))
    basis = [[vecs[j][i] for j in range(3)] for i in range(3)]  # eigenvectors as columns
    inv = _inverse(basis)
    out = []
    for j, lam in enumerate(roots):
        proj = tuple(tuple(basis[i][j] * inv[j][k] for k in range(3)) for i in range(3))
        out.append((lam, proj))
    return out


def closed_form(cv0: CountVector, k: int, matrix=None) -> CountVector:
    """``m^k cv0`` evaluated through the eigen decomposition."""
    if k < 0:
        raise ValueError("k must be non-negative")
    v = cv0.as_tuple()
    acc = [Fraction(0)] * 3
    for lam, proj in eigen_decomposition(matrix):
        pv = _mat_vec(proj, v)
        for i in range(3):
            acc[i] += Fraction(lam) ** k * pv[i]
    if any(x.denominator != 1 for x in acc):
        raise SubstitutionError("closed form produced a non-integer count")
    return CountVector(*(int(x) for x in acc))


def total_coefficients(cv0: CountVector, matrix=None) -> dict[int, Fraction]:
    """Coefficients ``c`` with ``total(m^k cv0) = sum c[lam] * lam^k``."""
    v = cv0.as_tuple()
    out = {}
    for lam, proj in eigen_decomposition(matrix):
        out[lam] = sum(_mat_vec(proj, v), Fraction(0))
    return out


def _component_coefficients(matrix=None):
    """``[i][j] -> {lam: coef}`` for the entries of ``m^k``."""
    dec = eigen_decomposition(matrix)
    return tuple(tuple({lam: proj[i][j] for lam, proj in dec} for j in range(3)) for i in range(3))


# -- rank-0 orbits ---------------------------------------------------------------


@dataclass
class Rank0Orbit:
    name: str
    seed: Point
    word: tuple[str, ...]
    counts: CountVector

    def period(self, n: int, matrix=None) -> int:
        """Folded period of the rank-``n`` descendant, from the closed form."""
        return closed_form(self.counts, n, matrix).total

    def period_coefficients(self, matrix=None) -> dict[int, Fraction]:
        return total_coefficients(self.counts, matrix)


def _word_cell(sys: SectorSystem, word: Sequence[str]) -> tuple[ConvexPolygon, Isometry]:
    """Points of a convex piece whose itinerary starts with ``word`` and the composed motion."""
    first = sys.pieces[word[0]][0].as_convex()
    cell = first
    mot = Isometry.identity()
    for letter in word:
        reg, step = sys.pieces[letter]
        img = mot(cell)
        img = intersect(img, reg.as_convex())
        if img is None or img.degenerate:
            raise SectorSystemError("word cell", f"word {''.join(word)} is not realised")
        cell = mot.inverse()(img)
        mot = step.compose(mot)
    return cell, mot


def _neighbourhood_seed(sys: SectorSystem, word: Sequence[str]) -> tuple[Point, Point, ConvexPolygon]:
    """Centre of the periodic cell of ``word``, a non-central point of its invariant figure, and the figure."""
    cell, mot = _word_cell(sys, word)
    centre = mot.fixed_point()
    fig = invariant_figure(cell, mot)
    if fig is None:
        raise SectorSystemError("neighbourhood", f"word {''.join(word)} has no invariant figure")
    v = fig.vertices[0]
    return centre, Point((centre.x + v.x) / 2, (centre.y + v.y) / 2), fig


def rank0_orbits(sys: SectorSystem) -> list[Rank0Orbit]:
    """The rank-0 orbit classes: the points V, U, W1 and the octagons around them.

    W1 is the centre of the two-letter cycle ``vw``.  Every word is read off
    by direct simulation.
    """
    out = []
    for name, word in (("V", ("v",)), ("U", ("u",)), ("W1", ("v", "w"))):
        centre, nb, _ = _neighbourhood_seed(sys, word)
        for label, seed in ((name, centre), (f"{name}-neighbourhood", nb)):
            cyc = tuple(sys.map.cycle(seed, 10_000))
            out.append(Rank0Orbit(label, seed, cyc, CountVector.of_word(cyc)))
    return out


def simulated_period(sys: SectorSystem, seed: Point, n: int, budget: int = 1_000_000) -> int:
    """Folded period of ``gamma^n(seed)`` by direct iteration."""
    x = seed
    for _ in range(n):
        x = sys.gamma(x)
    return len(sys.map.cycle(x, budget))


def conjugacy_check(sys: SectorSystem, samples: int = 100, seed: int = 1) -> dict[str, int]:
    """Count, per piece, the samples where ``word(gamma x) = gamma(step x)`` holds exactly."""
    rng = random.Random(seed)
    ok = {}
    for name in LETTERS:
        reg, mot = sys.pieces[name]
        good = 0
        for _ in range(samples):
            x = interior_sample(reg, rng)
            y = sys.gamma(x)
            try:
                for letter in sys.substitution[name]:
                    got, y = sys.map.apply(y)
                    if got != letter:
                        break
                else:
                    good += y == sys.gamma(mot(x))
            except BoundaryPoint:
                pass
        ok[name] = good
    return ok


def substituted_cycle_check(sys: SectorSystem) -> list[tuple[str, bool]]:
    """Rank-1 cycles read by simulation equal the substituted rank-0 cycles."""
    out = []
    for orb in rank0_orbits(sys):
        cyc = tuple(sys.map.cycle(sys.gamma(orb.seed), 1_000_000))
        out.append((orb.name, cyc == substitute(orb.word, sys.substitution)))
    return out


def rank_octagons(sys: SectorSystem, n: int) -> list[ConvexPolygon]:
    """All distinct octagons carried by the orbits of ``gamma^n`` of V, U and W1.

    Each octagon is pushed through the folded map as a whole; it must lie in
    a single piece at every step (so it is a genuine periodic cell).
    """
    found: dict[ConvexPolygon, None] = {}
    for word in (("v",), ("u",), ("v", "w")):
        _, _, fig = _neighbourhood_seed(sys, word)
        for _ in range(n):
            fig = sys.gamma(fig)
        cur = fig
        while True:
            found.setdefault(cur, None)
            name, _ = sys.map.apply(cur.centroid())
            reg, mot = sys.pieces[name]
            if any(reg.contains(v) is Location.EXTERIOR for v in cur.vertices):
                raise SectorSystemError("octagon census", "an octagon straddles a piece boundary")
            cur = mot(cur)
            if cur == fig:
                break
    return list(found)


def octagon_census(sys: SectorSystem, n: int, grid: int = 24, budget: int = 2_000) -> dict:
    """Count rank-``n`` octagons and check that sampled low-period points fall in them.

    Grid points of OKLM whose folded period equals one of the rank-``n``
    octagon periods must lie inside one of the enumerated octagons.
    """
    octs = rank_octagons(sys, n)
    for i, a in enumerate(octs):
        for b in octs[i + 1:]:
            h = intersect(a, b)
            if h is not None and not h.degenerate:
                raise SectorSystemError("octagon census", "two octagons overlap")
    periods = {o.period(n) for o in rank0_orbits(sys) if o.name.endswith("neighbourhood")}
    xs = [v.x for v in sys.domain.vertices]
    ys = [v.y for v in sys.domain.vertices]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    tested = 0
    missed = 0
    for i in range(grid):
        for j in range(grid):
            p = Point(x0 + (x1 - x0) * Fraction(2 * i + 1, 2 * grid) + Fraction(1, 10007),
                      y0 + (y1 - y0) * Fraction(2 * j + 1, 2 * grid) + Fraction(1, 10009))
            if sys.domain.contains(p) is not Location.INTERIOR:
                continue
            try:
                per = len(sys.map.cycle(p, budget))
            except (RuntimeError, BoundaryPoint):
                continue
            if per not in periods:
                continue
            tested += 1
            if not any(_inside(o, p) for o in octs):
                missed += 1
    return {"rank": n, "octagons": len(octs), "expected": 4 * 9 ** n, "sampled": tested, "missed": missed}


def _inside(poly: ConvexPolygon, p: Point) -> bool:
    from .geometry import contains

    return contains(poly, p) is not Location.EXTERIOR


# -- printed data versus derivation ------------------------------------------------


def discrepancy_report(sys: SectorSystem) -> dict[str, bool]:
    """Which printed artifacts survive the exact derivation (True = matches)."""
    words = sys.substitution
    m = sys.matrix
    rep: dict[str, bool] = {}
    for name in LETTERS:
        rep[f"word_{name}"] = words[name] == PRINTED_WORDS[name]
        rep[f"k_{name}"] = len(words[name]) == PRINTED_K[name]
        rep[f"printed_word_length_{name}"] = len(PRINTED_WORDS[name]) == PRINTED_K[name]
    rep["matrix"] = m == PRINTED_MATRIX
    rep["printed_words_vs_printed_matrix"] = count_matrix(PRINTED_WORDS) == PRINTED_MATRIX
    roots = sorted(lam for lam, _ in eigen_decomposition(m))
    rep["eigenvalues"] = roots == sorted(PRINTED_EIGENVALUES)
    coef = _component_coefficients(m)
    for i, out_name in enumerate("abc"):
        for j, in_name in enumerate("abc"):
            want = dict(zip((1, -3, 9), PRINTED_CLOSED_FORM[i][j]))
            got = {lam: coef[i][j].get(lam, 0) for lam in (1, -3, 9)}
            rep[f"closed_form_{out_name}_{in_name}0"] = got == want
    for j, in_name in enumerate("abc"):
        basis = [0, 0, 0]
        basis[j] = 1
        got = total_coefficients(CountVector(*basis), m)
        want = {9: PRINTED_TOTAL[j][0], -3: PRINTED_TOTAL[j][1], 1: Fraction(0)}
        rep[f"total_{in_name}0"] = {lam: got.get(lam, 0) for lam in want} == want
    orbits = {o.name: o for o in rank0_orbits(sys)}
    for name, (word, counts, (c9, c3)) in PRINTED_RANK0_PERIODS.items():
        o = orbits[name]
        rep[f"rank0_word_{name}"] = _same_cycle(o.word, tuple(word))
        rep[f"rank0_counts_{name}"] = o.counts.as_tuple() == counts
        got = o.period_coefficients(m)
        rep[f"rank0_period_{name}"] = {lam: got.get(lam, 0) for lam in (9, -3, 1)} == {9: c9, -3: c3, 1: 0}
    return rep


def _same_cycle(a: tuple, b: tuple) -> bool:
    if len(a) != len(b):
        return False
    return any(a[i:] + a[:i] == b for i in range(len(a))) or not a


# -- aperiodic witness -------------------------------------------------------------


@dataclass
class WitnessLink:
    index: int
    region: ConvexPolygon
    folded_period: int
    period: int


@dataclass
class Witness:
    links: list[WitnessLink]
    boxes: list[Region]
    limit: Point
    similarity: Similitude

    def to_json(self) -> dict:
        return {
            "limit": self.limit.to_json(),
            "components": [
                {"index": l.index, "polygon": l.region.to_json(), "folded_period": l.folded_period, "period": l.period}
                for l in self.links
            ],
            "boxes": [b.to_json() for b in self.boxes],
        }


def _tip_similarity(sys: SectorSystem) -> Similitude:
    """Spiral similarity sending OKLM onto the gap between the tip K and the V-octagon.

    O goes to K, and L to the corner of the V-octagon nearest K.
    """
    c = sys.corners
    voct = sys.invariant_octagons["V"]
    near = min(voct.vertices, key=lambda p: (p - c["K"]).dot(p - c["K"]))
    return Similitude.mapping(c["O"], c["L"], c["K"], near)


def aperiodic_witness(sys: SectorSystem, depth: int, budget: int = 2_000_000) -> Witness:
    """Chain of periodic octagons accumulating near the tip K.

    ``c_i = psi^i(V-octagon)`` where ``psi`` is the spiral similarity onto
    the K-tip gap.  Components are grouped in triples; the ``j``-th triple
    lies in ``psi^(3j)(OKLM)``, and these boxes are nested around the fixed
    point of ``psi``.  Each ``c_i`` is confirmed as an exact component of
    the unfolded map, and the periods must increase strictly.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    psi = _tip_similarity(sys)
    if any(sys.domain.contains(v) is Location.EXTERIOR for v in psi(sys.domain).vertices):
        raise SectorSystemError("witness", "the tip similarity leaves OKLM")
    limit = psi.fixed_point()
    links = []
    boxes = []
    cur = sys.invariant_octagons["V"]
    box = sys.domain
    for i in range(3 * depth):
        if i % 3 == 0:
            if boxes and any(boxes[-1].contains(v) is Location.EXTERIOR for v in box.vertices):
                raise SectorSystemError("witness", "boxes are not nested")
            if box.contains(limit) is not Location.INTERIOR:
                raise SectorSystemError("witness", "limit point escapes a box")
            boxes.append(box)
            box = psi(psi(psi(box)))
        if any(boxes[-1].contains(v) is Location.EXTERIOR for v in cur.vertices):
            raise SectorSystemError("witness", f"component {i} leaves its box")
        # the centroid is a rotation centre with a shorter cycle; use a generic point
        p = (cur.centroid() + cur.vertices[0]).scale(Fraction(1, 2))
        try:
            fper = len(sys.map.cycle(p, budget))
        except (RuntimeError, BoundaryPoint) as exc:
            raise SectorSystemError("witness", f"component {i} is not periodic: {exc}") from None
        comp = component_of(sys.table, p, budget)
        if comp.region != cur:
            raise SectorSystemError("witness", f"component {i} is not a maximal periodic cell")
        links.append(WitnessLink(i, cur, fper, comp.period))
        cur = psi(cur)
    for a, b in zip(links, links[1:]):
        if not (b.folded_period > a.folded_period and b.period > a.period):
            raise SectorSystemError("witness", f"periods do not increase at component {b.index}")
    return Witness(links, boxes, limit, psi)
