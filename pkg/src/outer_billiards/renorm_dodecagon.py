"""Renormalization structures of outer billiards around the regular dodecagon.

The first invariant ring, folded by the 30 degree rotation group, is the
"rocket" A: a fan from the tip A_0 over the necklace chain facing it.  The
folded map cuts A into five zones; zone ``i`` is rotated by ``150 - 30 i``
degrees.  From the zones and their invariant figures come two homotheties
centred at the tip:

* ``gamma`` with ratio 7 - 4 sqrt3, which sends the necklace onto the zone-0
  dodecagon (and the rocket onto the small rocket),
* ``middle`` with ratio 2 sqrt3 - 3, which sends the necklace onto the zone-3
  dodecagon (and the rocket onto the middle rocket).

The remaining domains (airplanes, zone 0 and its middle copy, the small
middle rocket and its copy X strictly inside the middle rocket) are built
from these.  First-return tables are computed by exact piece propagation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .billiard import BilliardTable, make_table
from .exactfield import ZERO, QuadExt, SQRT3
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
    Partition,
    PiecewiseMap,
    component_of,
    folded_pieces,
    invariant_figure,
    necklace_component,
    pinwheel_domain,
    return_partition,
)
from .billiard import orbit

__all__ = [
    "ZONE_ANGLES",
    "LAMBDA",
    "GOLDEN_TABLES",
    "TARGETS",
    "TARGET_ALIASES",
    "RocketSystemError",
    "GrowthViolation",
    "Zone",
    "RocketSystem",
    "build_rocket_system",
    "zone_invariant_figures",
    "check_figure_shapes",
    "rocket_return_table",
    "rocket_partition",
    "ConjugacyReport",
    "verify_scaling_conjugacy",
    "verify_hypothesis1",
    "GrowthLink",
    "GrowthWitness",
    "locate_seed_components",
    "period_under_return_map",
    "period_growth_witness",
]

ZONE_ANGLES = (150, 120, 90, 60, 30)
LAMBDA = 7 - 4 * SQRT3

# Printed first-return tables: (side counts, return times), ordered by time.
GOLDEN_TABLES = {
    "A_мал": ((4, 3, 3, 4, 3, 6, 4, 4, 4, 3), (2, 3, 11, 20, 35, 37, 63, 185, 269, 479)),
    "A_ср": ((3, 4, 4, 4, 4, 3, 4, 4), (1, 1, 1, 1, 10, 25, 27, 53)),
    "A_мал_ср": ((4, 3, 4, 4, 4, 4, 3, 4), (20, 35, 37, 63, 318, 525, 743, 987)),
    "самолётик_большой": ((3, 3, 4, 3, 6, 4, 4, 4, 3), (1, 9, 18, 33, 35, 61, 183, 267, 477)),
    "самолётик_маленький": ((3, 3, 4, 6, 3, 4, 4, 4, 3), (35, 429, 684, 891, 1109, 1353, 4939, 7463, 13773)),
    "зона0": ((4, 3, 4, 3, 6, 4, 4, 4, 3), (1, 10, 19, 34, 36, 62, 184, 268, 478)),
    "зона0_средняя": ((3, 4, 4, 3, 5, 5, 4, 4, 4, 3), (18, 20, 24, 35, 37, 48, 63, 196, 280, 490)),
    "A_мал_мал": ((4, 3, 3, 4, 6, 3, 4, 4, 4, 3), (70, 105, 499, 754, 961, 1179, 1423, 5009, 7533, 13843)),
}
TARGETS = tuple(GOLDEN_TABLES)
TARGET_ALIASES = {
    "small": "A_мал",
    "middle": "A_ср",
    "small_middle": "A_мал_ср",
    "airplane": "самолётик_большой",
    "small_airplane": "самолётик_маленький",
    "zone0": "зона0",
    "middle_zone0": "зона0_средняя",
    "small_small": "A_мал_мал",
}


class RocketSystemError(ValueError):
    """A validation of the rocket construction failed."""

    def __init__(self, check: str, detail: str = ""):
        super().__init__(f"{check}: {detail}" if detail else check)
        self.check = check


class GrowthViolation(AssertionError):
    """per(C_{n+3}) < 2 per(C_n) for some n."""


@dataclass
class Zone:
    index: int
    region: Region
    motion: Isometry

    @property
    def angle(self) -> int:
        return self.motion.angle

    @property
    def center(self) -> Point:
        return self.motion.fixed_point()


@dataclass
class RocketSystem:
    table: BilliardTable
    rocket: Region
    zones: list[Zone]
    necklace: ConvexPolygon
    lam: QuadExt
    middle_ratio: QuadExt
    gamma: Similitude
    middle: Similitude
    sub_rockets: dict[str, Region]
    gamma_x: Similitude
    x_steps: int
    map: PiecewiseMap = field(repr=False)

    @property
    def apex(self) -> Point:
        return self.table.vertices[0]

    @cached_property
    def figures(self) -> list[ConvexPolygon]:
        return zone_invariant_figures(self)

    def domain(self, which: str) -> Region:
        return self.sub_rockets[TARGET_ALIASES.get(which, which)]


def _is_kite(q: ConvexPolygon) -> bool:
    """Convex quadrilateral with two pairs of equal adjacent sides."""
    if len(q) != 4:
        return False
    s = q.side_lengths2()
    return (s[0] == s[1] and s[2] == s[3]) or (s[1] == s[2] and s[3] == s[0])


def _is_isosceles(tri: ConvexPolygon) -> bool:
    s = tri.side_lengths2()
    return len(tri) == 3 and (s[0] == s[1] or s[1] == s[2] or s[2] == s[0])


def _homothety_onto(o: Point, src: ConvexPolygon, dst: ConvexPolygon) -> Similitude:
    """The homothety centred at ``o`` taking ``src`` onto ``dst`` exactly."""
    cs, cd = src.centroid(), dst.centroid()
    if orient(o, cs, cd) != 0:
        raise RocketSystemError("homothety", "centres are not aligned with the apex")
    k = (cd - o).dot(cs - o) / (cs - o).dot(cs - o)
    h = Similitude.homothety(o, k)
    if h(src) != dst:
        raise RocketSystemError("homothety", "image does not coincide with the target figure")
    return h


def build_rocket_system(t: BilliardTable | None = None) -> RocketSystem:
    """Fold the first invariant ring, extract the zones and derive every sub-rocket."""
    t = t or make_table("dodecagon")
    if t.n != 12:
        raise RocketSystemError("table", "the rocket system is built for the dodecagon")
    parts = pinwheel_domain(t)
    rocket = Region(parts)
    fps = folded_pieces(t, parts)
    if len(fps) != 5:
        raise RocketSystemError("zone count", f"expected 5 zones, found {len(fps)}")
    fps.sort(key=lambda fp: -fp.angle)
    zones = [Zone(i, fp.region, fp.motion) for i, fp in enumerate(fps)]
    angles = tuple(z.angle for z in zones)
    if angles != ZONE_ANGLES:
        raise RocketSystemError("zone rotations", f"found {angles}")
    if sum((z.region.area() for z in zones), ZERO) != rocket.area():
        raise RocketSystemError("tiling", "zone areas do not add up to the rocket")
    if not zones[0].region.is_convex() or not _is_isosceles(zones[0].region.as_convex()):
        raise RocketSystemError("zone shapes", "zone 0 is not an isosceles triangle")
    for z in zones[1:4]:
        if not z.region.is_convex() or not _is_kite(z.region.as_convex()):
            raise RocketSystemError("zone shapes", f"zone {z.index} is not a kite")
    if zones[4].region.is_convex():
        raise RocketSystemError("zone shapes", "zone 4 should be non-convex")

    apex = t.vertices[0]
    neck = necklace_component(t).region
    figs = [_figure(z) for z in zones[:4]]
    gamma = _homothety_onto(apex, neck, figs[0])
    middle = _homothety_onto(apex, neck, figs[3])
    lam = gamma.a
    if lam != LAMBDA or lam * (7 + 4 * SQRT3) != 1:
        raise RocketSystemError("contraction", f"ratio {lam} is not 7 - 4 sqrt3")

    zmap = PiecewiseMap([(str(z.index), z.region, z.motion) for z in zones])
    subs: dict[str, Region] = {}
    subs["A"] = rocket
    subs["A_мал"] = gamma(rocket)
    subs["A_мал_мал"] = gamma(gamma(rocket))
    subs["A_ср"] = middle(rocket)
    subs["A_мал_ср"] = gamma(subs["A_ср"])
    subs["зона0"] = zones[0].region
    subs["зона0_средняя"] = middle(zones[0].region)
    subs["самолётик_большой"] = _airplane(apex, figs[1])
    subs["самолётик_маленький"] = gamma(subs["самолётик_большой"])
    steps, carry = _inner_copy(zones, subs["A_мал_ср"], subs["A_ср"])
    subs["X"] = carry(subs["A_мал_ср"])
    gamma_x = Similitude.from_isometry(carry).compose(gamma)
    if not gamma_x(subs["A_ср"]).same_set(subs["X"]):
        raise RocketSystemError("X", "gamma_X does not carry the middle rocket onto X")
    return RocketSystem(t, rocket, zones, neck, lam, middle.a, gamma, middle, subs, gamma_x, steps, zmap)


def _figure(z: Zone) -> ConvexPolygon:
    fig = invariant_figure(z.region.as_convex(), z.motion)
    if fig is None:
        raise RocketSystemError("invariant figure", f"zone {z.index} has an empty invariant figure")
    return fig


def _airplane(apex: Point, hexagon: ConvexPolygon) -> Region:
    """The arrowhead between the apex and the zone-1 hexagon.

    Its corners are the apex, the hexagon corner nearest the apex and the two
    hexagon corners next to it.
    """
    hv = hexagon.vertices
    i = min(range(len(hv)), key=lambda k: (hv[k] - apex).dot(hv[k] - apex))
    top, before, after = hv[i], hv[i - 1], hv[(i + 1) % len(hv)]
    return Region([_ccw([apex, before, top]), _ccw([apex, top, after])])


def _ccw(tri: list[Point]) -> ConvexPolygon:
    return ConvexPolygon(tri if orient(*tri) > 0 else tri[::-1])


def _inner_copy(zones: list[Zone], small: Region, big: Region, max_steps: int = 12):
    """First forward image of ``small`` under the folded map lying strictly inside ``big``.

    Each step moves the whole region by one zone's rotation; the region must
    stay inside a single zone.  Returns the step count and the composed motion.
    """
    cur = small
    carry = Isometry.identity()
    for j in range(1, max_steps + 1):
        zone = next((z for z in zones if all(z.region.contains(v) is not Location.EXTERIOR for v in cur.vertices)), None)
        if zone is None:
            break
        cur = zone.motion(cur)
        carry = zone.motion.compose(carry)
        if all(big.contains(v) is Location.INTERIOR for p in cur.parts for v in p.vertices):
            return j, carry
    raise RocketSystemError("X", "no image of the small middle rocket lies strictly inside the middle rocket")


# -- invariant figures ------------------------------------------------------------


def zone_invariant_figures(sys: RocketSystem) -> list[ConvexPolygon]:
    """Invariant figures of zones 0-3 (rotation orders 12, 3, 4, 6)."""
    return [_figure(z) for z in sys.zones[:4]]


def _angle_is(u: Point, v: Point, deg: int) -> bool:
    d = u.dot(v)
    uu, vv = u.dot(u), v.dot(v)
    if deg == 90:
        return d == 0
    if deg == 120:
        return d.sign() < 0 and d * d * 4 == uu * vv
    if deg == 150:
        return d.sign() < 0 and d * d * 4 == uu * vv * 3
    if deg == 60:
        return d.sign() > 0 and d * d * 4 == uu * vv
    raise ValueError(f"unsupported angle {deg}")


def _angles_match(p: ConvexPolygon, pattern: Sequence[int]) -> bool:
    """Interior angles follow ``pattern`` cyclically, starting somewhere."""
    vs = p.vertices
    n = len(vs)
    got = []
    for i in range(n):
        u, v = vs[i - 1] - vs[i], vs[(i + 1) % n] - vs[i]
        got.append(next((d for d in set(pattern) if _angle_is(u, v, d)), None))
    want = [pattern[i % len(pattern)] for i in range(n)]
    return any(got[s:] + got[:s] == want for s in range(n))


def _equilateral(p: ConvexPolygon) -> bool:
    return len(set(p.side_lengths2())) == 1


def _regular(p: ConvexPolygon, n: int) -> bool:
    c = p.centroid()
    return len(p) == n and _equilateral(p) and len({(v - c).dot(v - c) for v in p.vertices}) == 1


def check_figure_shapes(figs: Sequence[ConvexPolygon]) -> dict[str, bool]:
    return {
        "zone0_regular_dodecagon": _regular(figs[0], 12),
        "zone1_hexagon_90_150": len(figs[1]) == 6 and _equilateral(figs[1]) and _angles_match(figs[1], (90, 150)) and not _regular(figs[1], 6),
        "zone2_octagon_150_120": len(figs[2]) == 8 and _equilateral(figs[2]) and _angles_match(figs[2], (150, 120)) and not _regular(figs[2], 8),
        "zone3_regular_dodecagon": _regular(figs[3], 12),
    }


# -- return tables ------------------------------------------------------------------


def _budget(which: str) -> int:
    """Twice the longest printed return time of the domain (X uses its twin A_мал_ср)."""
    if which == "X":
        which = "A_мал_ср"
    return 2 * max(GOLDEN_TABLES[which][1]) if which in GOLDEN_TABLES else 40_000


def rocket_partition(sys: RocketSystem, which: str, budget: int | None = None) -> Partition:
    which = TARGET_ALIASES.get(which, which)
    if which not in sys.sub_rockets:
        raise KeyError(f"unknown domain {which!r}; expected one of {sorted(sys.sub_rockets)}")
    return return_partition(sys.table, list(sys.sub_rockets[which].parts), budget or _budget(which))


def rocket_return_table(sys: RocketSystem, which: str, budget: int | None = None) -> list[tuple[int, int]]:
    """(side count, return time) pairs of the first-return partition, by return time."""
    part = rocket_partition(sys, which, budget)
    if part.unresolved:
        raise RocketSystemError("unresolved", f"{len(part.unresolved)} pieces did not return within the budget")
    return part.table()


# -- conjugacy checks ---------------------------------------------------------------


@dataclass
class ConjugacyReport:
    samples: list[Point]
    max_defect: QuadExt
    return_times: list[tuple[int, int]]
    excluded: list[tuple[Point, str]]
    piece_matches: list[bool]
    extra: dict = field(default_factory=dict)

    @property
    def matched(self) -> bool:
        return self.max_defect == 0 and len(self.samples) > 0 and all(self.piece_matches) and all(
            v for v in self.extra.values() if isinstance(v, bool)
        )

    def to_json(self) -> dict:
        return {
            "samples": len(self.samples),
            "max_defect": str(self.max_defect),
            "excluded": [{"point": p.to_json(), "reason": r} for p, r in self.excluded],
            "return_times": self.return_times,
            "piece_matches": self.piece_matches,
            "matched": self.matched,
            **{k: v for k, v in self.extra.items()},
        }


def _conjugacy(sys: RocketSystem, scale, big: Region, small: Region, strata: Sequence[Region], samples: int, seed: int, budget: int):
    """Samples are drawn round-robin from ``strata`` so that every piece is exercised."""
    rng = random.Random(seed)
    pts: list[Point] = []
    times: list[tuple[int, int]] = []
    excluded: list[tuple[Point, str]] = []
    worst = ZERO
    k = 0
    while len(pts) < samples:
        x = interior_sample(strata[k % len(strata)], rng)
        k += 1
        try:
            w_big, y_big = sys.map.first_return(x, big, budget)
        except BoundaryPoint:
            excluded.append((x, "T_ср undefined"))
            continue
        try:
            w_small, y_small = sys.map.first_return(scale(x), small, budget)
        except BoundaryPoint:
            excluded.append((x, "small return undefined"))
            continue
        d = scale(y_big) - y_small
        worst = max(worst, d.dot(d))
        pts.append(x)
        times.append((len(w_big), len(w_small)))
    return pts, worst, times, excluded


def _piece_matches(scale, big: Partition, small: Partition) -> list[bool]:
    out = []
    for p in big.pieces:
        img = scale(p.region)
        out.append(any(img.same_set(q.region) for q in small.pieces))
    return out


def verify_scaling_conjugacy(sys: RocketSystem, samples: int = 100, seed: int = 0, budget: int = 5_000) -> ConjugacyReport:
    """``T_small_middle(gamma x) = gamma(T_middle x)`` on exact samples and piece by piece."""
    big, small = sys.sub_rockets["A_ср"], sys.sub_rockets["A_мал_ср"]
    pb = rocket_partition(sys, "A_ср")
    pts, worst, times, excl = _conjugacy(sys, sys.gamma, big, small, [p.region for p in pb.pieces], samples, seed, budget)
    ps = rocket_partition(sys, "A_мал_ср")
    extra = {
        "apex_fixed": sys.gamma(sys.apex) == sys.apex,
        "side_multisets_equal": sorted(p.side_count for p in pb.pieces) == sorted(p.side_count for p in ps.pieces),
    }
    return ConjugacyReport(pts, worst, times, excl, _piece_matches(sys.gamma, pb, ps), extra)


def verify_hypothesis1(sys: RocketSystem, samples: int = 100, seed: int = 0, budget: int = 5_000) -> ConjugacyReport:
    """``gamma_X(T_middle p) = T_X(gamma_X p)`` on exact samples and piece by piece.

    Also compares the return times of X with those of the small middle
    rocket's printed table.
    """
    big, small = sys.sub_rockets["A_ср"], sys.sub_rockets["X"]
    pb = rocket_partition(sys, "A_ср")
    pts, worst, times, excl = _conjugacy(sys, sys.gamma_x, big, small, [p.region for p in pb.pieces], samples, seed, budget)
    px = rocket_partition(sys, "X")
    extra = {
        "x_times_match_table": [p.return_time for p in px.pieces] == list(GOLDEN_TABLES["A_мал_ср"][1]),
        "x_strictly_inside": all(big.contains(v) is Location.INTERIOR for p in small.parts for v in p.vertices),
        "no_return_within_one_step": min((t for _, t in times), default=0) >= 2,
    }
    return ConjugacyReport(pts, worst, times, excl, _piece_matches(sys.gamma_x, pb, px), extra)


# -- period growth ------------------------------------------------------------------


@dataclass
class GrowthLink:
    index: int
    region: ConvexPolygon
    period: int
    unfolded_period: int


@dataclass
class GrowthWitness:
    links: list[GrowthLink]
    boxes: list[Region]
    limit: Point

    def to_json(self) -> dict:
        return {
            "limit": self.limit.to_json(),
            "components": [
                {"index": l.index, "polygon": l.region.to_json(), "period": l.period, "unfolded_period": l.unfolded_period}
                for l in self.links
            ],
            "boxes": [b.to_json() for b in self.boxes],
        }


def locate_seed_components(sys: RocketSystem, per_edge: int = 24, budget: int = 100_000) -> list[ConvexPolygon]:
    """The three largest periodic components meeting X along a segment, largest first.

    Exact probe points are placed just outside each edge of X's outline
    (inside the middle rocket); each periodic probe gives a component via
    the unfolding construction.
    """
    x_reg = sys.sub_rockets["X"]
    big = sys.sub_rockets["A_ср"]
    cyc = x_reg.outline[0]
    found: dict[ConvexPolygon, None] = {}
    nudge = Point(QuadExt(1) / (10**9 + 7), QuadExt(1) / (10**9 + 9))
    for i in range(len(cyc)):
        a, b = cyc[i], cyc[(i + 1) % len(cyc)]
        d = b - a
        out = Point(d.y, -d.x)
        for s in range(1, per_edge):
            q = a + d.scale(QuadExt(s) / per_edge)
            for e in (QuadExt(1) / 10**4, QuadExt(1) / 10**3, QuadExt(1) / 300):
                p = q + out.scale(e) + nudge
                if x_reg.contains(p) is not Location.EXTERIOR or big.contains(p) is not Location.INTERIOR:
                    continue
                if any(_inside(c, p) for c in found):
                    continue
                res = orbit(sys.table, p, budget)
                if not res.is_periodic:
                    continue
                comp = component_of(sys.table, p, budget, res).region
                touches = False
                for part in x_reg.parts:
                    h = intersect(comp, part)
                    if h is not None and len(h) >= 2:
                        touches = True
                if touches:
                    found.setdefault(comp, None)
    comps = sorted(found, key=lambda c: c.area(), reverse=True)
    if len(comps) < 3:
        raise RocketSystemError("seeds", f"only {len(comps)} components border X")
    return comps[:3]


def _inside(poly: ConvexPolygon, p: Point) -> bool:
    from .geometry import contains

    return contains(poly, p) is not Location.EXTERIOR


def period_under_return_map(sys: RocketSystem, part: Partition, x: Point, budget: int = 1_000_000) -> int:
    """Period of ``x`` under the first-return map of a partition (piece motions applied in turn)."""
    y = x
    for n in range(1, budget + 1):
        piece = next((p for p in part.pieces if p.region.contains(y) is Location.INTERIOR), None)
        if piece is None:
            raise BoundaryPoint(y)
        y = piece.motion(y)
        if y == x:
            return n
    raise RuntimeError("no return within budget")


def _visits(sys: RocketSystem, x: Point, dom: Region, budget: int) -> int:
    """Folded orbit of ``x``: number of points in ``dom`` along one period."""
    y = x
    count = 0
    for _ in range(budget):
        _, y = sys.map.apply(y)
        if dom.contains(y) is Location.INTERIOR:
            count += 1
        if y == x:
            return count
    raise RuntimeError("no return within budget")


def period_growth_witness(
    sys: RocketSystem,
    n_max: int = 6,
    seeds: Sequence[ConvexPolygon] | None = None,
    budget: int = 2_000_000,
) -> GrowthWitness:
    """``C_n = gamma_X(C_{n-3})`` from the three seeds; periods under the middle-rocket return map.

    Each period is computed twice: by iterating the return partition of the
    middle rocket, and by counting visits of the folded orbit to the middle
    rocket.  ``per(C_{n+3}) >= 2 per(C_n)`` is asserted for every n.
    """
    if n_max < 3:
        raise ValueError("n_max must be at least 3")
    seeds = list(seeds) if seeds is not None else locate_seed_components(sys)
    big = sys.sub_rockets["A_ср"]
    part = rocket_partition(sys, "A_ср")
    gx = sys.gamma_x
    comps = list(seeds[:3])
    while len(comps) <= n_max:
        comps.append(gx(comps[len(comps) - 3]))
    links = []
    for n, c in enumerate(comps):
        # halfway to a corner: the centre of a symmetric cell may have a shorter period
        ctr, v0 = c.centroid(), c.vertices[0]
        p = Point((ctr.x + v0.x) / 2, (ctr.y + v0.y) / 2)
        per = period_under_return_map(sys, part, p, budget)
        if _visits(sys, p, big, budget * 8) != per:
            raise RocketSystemError("growth", f"period routes disagree for C_{n}")
        res = orbit(sys.table, p, budget * 8)
        if not res.is_periodic:
            raise RocketSystemError("growth", f"C_{n} is not periodic")
        links.append(GrowthLink(n, c, per, res.period))
    for n in range(len(links) - 3):
        if links[n + 3].period < 2 * links[n].period:
            raise GrowthViolation(f"per(C_{n + 3}) = {links[n + 3].period} < 2 per(C_{n}) = {2 * links[n].period}")
    boxes = [big]
    limit = gx.fixed_point()
    while len(boxes) * 3 < len(links):
        boxes.append(gx(boxes[-1]))
    for n, l in enumerate(links):
        if any(boxes[n // 3].contains(v) is Location.EXTERIOR for v in l.region.vertices):
            raise RocketSystemError("growth", f"C_{n} leaves its box")
    for outer, inner in zip(boxes, boxes[1:]):
        if any(outer.contains(v) is not Location.INTERIOR for p in inner.parts for v in p.vertices):
            raise RocketSystemError("growth", "boxes are not strictly nested")
    if any(b.contains(limit) is not Location.INTERIOR for b in boxes):
        raise RocketSystemError("growth", "limit point escapes a box")
    return GrowthWitness(links, boxes, limit)
