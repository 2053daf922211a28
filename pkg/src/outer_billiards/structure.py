"""Periodic components, first-return partitions, invariant figures, scans."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .billiard import BilliardTable, Folding, OrbitResult, UndefinedOnRay, orbit, step, tangent_vertex
from .exactfield import QuadExt
from .geometry import ConvexPolygon, Isometry, Line, Location, Point, Region, clip, interior_sample, intersect, orient

__all__ = [
    "Component",
    "NotPeriodicError",
    "wedge_lines",
    "box",
    "component_of",
    "ReturnPiece",
    "Partition",
    "return_partition",
    "merge_pieces",
    "convex_union",
    "subtract",
    "invariant_figure",
    "necklace_component",
    "pinwheel_domain",
    "FoldedPiece",
    "folded_pieces",
    "BoundaryPoint",
    "PiecewiseMap",
    "OrbitClass",
    "Census",
    "level_periods",
    "lattice_census",
    "ScanGrid",
    "scan_classify",
    "INVARIANT_NAMES",
    "random_outside_point",
    "check_invariants",
]


class NotPeriodicError(ValueError):
    pass


@dataclass
class Component:
    region: ConvexPolygon
    period: int
    itinerary: tuple[int, ...]
    center_special: bool = False
    seed: Point | None = None

    @property
    def center_period(self) -> int | None:
        return self.period // 2 if self.center_special else None


def wedge_lines(t: BilliardTable, i: int) -> tuple[Line, Line]:
    """The two half-planes whose intersection is the open region D_i.

    D_i is right of the line through edge ``i-1`` and left of the line
    through edge ``i``; both lines pass through vertex ``A_i``.
    """
    vs = t.vertices
    n = len(vs)
    prev_edge = Line(vs[i], vs[i - 1])  # reversed edge i-1: keeps its right side
    next_edge = Line(vs[i], vs[(i + 1) % n])
    return prev_edge, next_edge


def box(cx, cy, half) -> ConvexPolygon:
    return ConvexPolygon(
        [
            Point(cx - half, cy - half),
            Point(cx + half, cy - half),
            Point(cx + half, cy + half),
            Point(cx - half, cy + half),
        ]
    )


def _reflect_poly(a: Point, poly: ConvexPolygon) -> ConvexPolygon:
    return ConvexPolygon(Point(a.x + a.x - v.x, a.y + a.y - v.y) for v in poly.vertices)


def pull_region(t: BilliardTable, start: ConvexPolygon, word: Sequence[int]) -> tuple[ConvexPolygon | None, ConvexPolygon | None]:
    """Points of ``start`` whose itinerary begins with ``word``.

    Returns the region (in the starting position) and its image after
    ``len(word)`` steps.  Works by pushing the polygon forward, clipping it
    to each wedge before reflecting.
    """
    poly = start
    vs = t.vertices
    for i in word:
        l1, l2 = wedge_lines(t, i)
        poly = clip(clip(poly, l1), l2)
        if poly is None:
            return None, None
        poly = _reflect_poly(vs[i], poly)
    # the composed motion is a translation (even length) or a point reflection
    return _undo(t, word, poly), poly


def _motion(t: BilliardTable, word: Sequence[int]) -> Isometry:
    m = Isometry.identity()
    for i in word:
        m = Isometry.point_reflection(t.vertices[i]).compose(m)
    return m


def _undo(t: BilliardTable, word: Sequence[int], poly: ConvexPolygon) -> ConvexPolygon:
    return _motion(t, word).inverse()(poly)


def component_of(t: BilliardTable, x: Point, budget: int = 1_000_000, res: OrbitResult | None = None) -> Component:
    """Maximal open convex set of points sharing the itinerary of the periodic point ``x``."""
    res = res or orbit(t, x, budget)
    if not res.is_periodic:
        raise NotPeriodicError(f"{x!r} is not periodic ({res.label()})")
    word = res.itinerary
    odd = len(word) % 2 == 1
    if odd:
        word = word + word
    half = QuadExt(4)
    for v in t.vertices:
        half = max(half, abs(v.x - x.x) * 4, abs(v.y - x.y) * 4)
    while True:
        start = box(x.x, x.y, half)
        region, _ = pull_region(t, start, word)
        if region is None:
            raise AssertionError("periodic point lost during unfolding")
        if all(abs(v.x - x.x) < half and abs(v.y - x.y) < half for v in region.vertices):
            break
        half = half * 4
    return Component(region, len(word), tuple(word), odd, x)


# -- first-return partitions -------------------------------------------------


@dataclass
class ReturnPiece:
    region: Region
    return_time: int
    motion: Isometry
    itinerary: tuple[int, ...] = ()

    @property
    def side_count(self) -> int:
        return self.region.side_count

    def to_json(self) -> dict:
        return {
            "polygon": self.region.to_json(),
            "return_time": self.return_time,
            "side_count": self.side_count,
        }


@dataclass
class Partition:
    pieces: list[ReturnPiece]
    unresolved: list[tuple[ConvexPolygon, int]] = field(default_factory=list)

    def table(self) -> list[tuple[int, int]]:
        """(side_count, return_time) pairs ordered by return time."""
        return [(p.side_count, p.return_time) for p in self.pieces]


def subtract(poly: ConvexPolygon, cut: ConvexPolygon) -> list[ConvexPolygon]:
    """Closure of ``poly`` minus ``cut`` as disjoint convex polygons (zero-area bits dropped)."""
    out = []
    rest: ConvexPolygon | None = poly
    for e in cut.edges():
        outside = clip(rest, e.reversed())
        if outside is not None and not outside.degenerate:
            out.append(outside)
        rest = clip(rest, e)
        if rest is None or rest.degenerate:
            break
    return out


def _as_parts(base) -> list[ConvexPolygon]:
    if isinstance(base, ConvexPolygon):
        return [base]
    return list(base)


def _radial_range(t: BilliardTable, parts: list[ConvexPolygon]) -> float:
    c = t.center.floats()
    return max(((v.floats()[0] - c[0]) ** 2 + (v.floats()[1] - c[1]) ** 2) ** 0.5 for p in parts for v in p.vertices)


def _min_dist(poly: ConvexPolygon, c) -> float:
    """Float distance from ``c`` to a convex polygon; used only as a conservative filter."""
    vs = [v.floats() for v in poly.vertices]
    best = float("inf")
    for i in range(len(vs)):
        ax, ay = vs[i]
        bx, by = vs[(i + 1) % len(vs)]
        dx, dy = bx - ax, by - ay
        ll = dx * dx + dy * dy
        s = 0.0 if ll == 0 else max(0.0, min(1.0, ((c[0] - ax) * dx + (c[1] - ay) * dy) / ll))
        px, py = ax + s * dx - c[0], ay + s * dy - c[1]
        best = min(best, (px * px + py * py) ** 0.5)
    return best


def _wedge_split(t: BilliardTable, poly: ConvexPolygon) -> list[tuple[int, ConvexPolygon]]:
    try:
        i = tangent_vertex(t, poly.centroid())
    except UndefinedOnRay:
        i = None
    if i is not None:
        l1, l2 = wedge_lines(t, i)
        if all(l1.side(v) >= 0 and l2.side(v) >= 0 for v in poly.vertices):
            return [(i, poly)]
    out = []
    for j in range(t.n):
        l1, l2 = wedge_lines(t, j)
        part = clip(clip(poly, l1), l2)
        if part is not None and not part.degenerate:
            out.append((j, part))
    return out


def return_partition(
    t: BilliardTable,
    base,
    budget: int = 100_000,
    use_folded: bool = True,
) -> Partition:
    """First-return map of ``T`` (or of its quotient by rotations) to ``base``.

    ``base`` is a convex polygon or a list of convex polygons with disjoint
    interiors.  Pieces are pushed forward lazily and split only where a
    wedge boundary or the target crosses them.  With ``use_folded`` a piece
    also returns when it lands in a rotated copy of the base; the recorded
    motion then includes the rotation back.
    """
    parts = _as_parts(base)
    rots = [Isometry.identity()]
    if use_folded:
        rots = [t.rotation(k) for k in range(t.n)]
    targets = [(k, r(p)) for k, r in enumerate(rots) for p in parts]
    reach = _radial_range(t, parts)
    c = t.center.floats()
    vs = t.vertices
    # work items: (current polygon, motion from start, steps, itinerary)
    work = [(p, Isometry.identity(), 0, ()) for p in parts]
    done: list[ReturnPiece] = []
    unresolved: list[tuple[ConvexPolygon, int]] = []
    while work:
        poly, motion, steps, itin = work.pop()
        if steps >= budget:
            unresolved.append((motion.inverse()(poly), steps))
            continue
        for i, piece in _wedge_split(t, poly):
            refl = Isometry.point_reflection(vs[i])
            img = refl(piece)
            mot = refl.compose(motion)
            it = itin + (i,)
            remaining = [img]
            if _min_dist(img, c) <= reach + 1e-9:
                for k, tgt in targets:
                    nxt = []
                    for r in remaining:
                        hit = intersect(r, tgt)
                        if hit is None or hit.degenerate:
                            nxt.append(r)
                            continue
                        back = rots[-k] if k else None
                        full = back.compose(mot) if back else mot
                        done.append(ReturnPiece(Region([full.inverse()(back(hit) if back else hit)]), steps + 1, full, it))
                        nxt.extend(subtract(r, tgt))
                    remaining = nxt
            for r in remaining:
                work.append((r, mot, steps + 1, it))
    pieces = merge_pieces(done)
    # equal return times: larger rotation angle first, then position
    pieces.sort(key=lambda p: (p.return_time, -p.motion.angle, p.region.sort_key()))
    return Partition(pieces, unresolved)


def _hull(points: Iterable[Point]) -> ConvexPolygon:
    pts = sorted(set(points), key=lambda p: (p.x, p.y))
    if len(pts) < 3:
        return ConvexPolygon(pts)

    def chain(ps):
        h: list[Point] = []
        for p in ps:
            while len(h) >= 2 and _turn(h[-2], h[-1], p) <= 0:
                h.pop()
            h.append(p)
        return h

    lo = chain(pts)
    up = chain(pts[::-1])
    return ConvexPolygon(lo[:-1] + up[:-1])


def _turn(a: Point, b: Point, c: Point) -> int:
    return ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)).sign()


def convex_union(polys: Sequence[ConvexPolygon]) -> ConvexPolygon | None:
    """The union when it is convex (hull area equals the summed area), else None."""
    hull = _hull(v for p in polys for v in p.vertices)
    total = sum((p.area() for p in polys), QuadExt(0))
    return hull if hull.area() == total else None


def merge_pieces(pieces: list[ReturnPiece]) -> list[ReturnPiece]:
    """Union adjacent pieces that share return time and motion.

    The union may be non-convex; it is kept as a :class:`Region` of convex
    parts.
    """
    groups: dict[tuple, list[ReturnPiece]] = {}
    for p in pieces:
        groups.setdefault((p.return_time, p.motion), []).append(p)
    out = []
    for (time, motion), grp in groups.items():
        polys = [q for p in grp for q in p.region.parts]
        # union-find over edge adjacency
        parent = list(range(len(polys)))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for a in range(len(polys)):
            for b in range(a + 1, len(polys)):
                if find(a) != find(b) and _shares_edge(polys[a], polys[b]):
                    parent[find(a)] = find(b)
        comps: dict[int, list[ConvexPolygon]] = {}
        for a in range(len(polys)):
            comps.setdefault(find(a), []).append(polys[a])
        for parts in comps.values():
            out.append(ReturnPiece(Region(parts), time, motion, grp[0].itinerary))
    return out


def _shares_edge(a: ConvexPolygon, b: ConvexPolygon) -> bool:
    """True when the closures meet along a segment of positive length."""
    for e in a.edges():
        d = e.q - e.p
        ts = [(v - e.p).dot(d) for v in b.vertices if e.side(v) == 0]
        if len(ts) < 2:
            continue
        lo = max(min(ts), QuadExt(0))
        hi = min(max(ts), d.dot(d))
        if lo < hi:
            return True
    return False


# -- folded systems ------------------------------------------------------------


def invariant_figure(base_zone: ConvexPolygon, rot: Isometry, order: int | None = None) -> ConvexPolygon | None:
    """Largest subset of ``base_zone`` invariant under the finite-order rotation ``rot``.

    Returns ``None`` (the empty marker) when the intersection has no interior.
    """
    if order is None:
        if rot.angle == 0:
            raise ValueError("a translation has infinite order")
        from math import gcd

        order = 360 // gcd(360, rot.angle)
    power = Isometry.identity()
    for _ in range(order):
        power = rot.compose(power)
    if power != Isometry.identity():
        raise ValueError("rotation does not have the given order")
    fig: ConvexPolygon | None = base_zone
    img = base_zone
    for _ in range(order - 1):
        img = rot(img)
        fig = intersect(fig, img)
        if fig is None or fig.degenerate:
            return None
    return fig


def necklace_component(t: BilliardTable, budget: int = 10_000) -> Component:
    """The table-sized periodic component straddling the bisector of the wedge at ``A_0``.

    The bisector is scanned outward from ``A_0`` at exact sample points; the
    first component of period ``n`` congruent to the table is returned.
    """
    vs = t.vertices
    a0 = vs[0]
    # direction of the bisector: sum of the unit directions of the two wedge edges
    d1 = a0 - vs[-1]
    d2 = vs[1] - a0
    d = d1 + d2
    tiny = Fraction(1, 997)
    side2 = (vs[1] - vs[0]).dot(vs[1] - vs[0])
    for k in range(1, 400):
        s = Fraction(k, 16) + tiny
        x = Point(a0.x + d.x * s + Fraction(1, 1009), a0.y + d.y * s)
        res = orbit(t, x, budget)
        if not res.is_periodic or res.period != t.n:
            continue
        comp = component_of(t, x, budget, res)
        reg = comp.region
        if len(reg) == t.n and all(l2 == side2 for l2 in reg.side_lengths2()):
            return comp
    raise AssertionError("no necklace component found on the wedge bisector")


def pinwheel_domain(t: BilliardTable) -> list[ConvexPolygon]:
    """Fundamental domain of the first invariant ring modulo rotations.

    The side extensions (where ``T`` is undefined) cut the ring inside the
    necklace into ``n`` congruent pieces; the one with its tip at ``A_0``
    lies between the lines of the two sides meeting at ``A_0``.  Returned as
    a fan of triangles from ``A_0``.
    """
    vs = t.vertices
    a0 = vs[0]
    right = Line(vs[-1], a0)
    left = Line(a0, vs[1])
    neck = necklace_component(t).region.vertices
    m = len(neck)
    on_right = [i for i in range(m) if right.side(neck[i]) == 0]
    on_left = [i for i in range(m) if left.side(neck[i]) == 0]
    if not on_right or not on_left:
        raise AssertionError("necklace does not touch both wedge lines")
    # a necklace edge may lie along a wedge line; the corner nearest the tip counts
    near = lambda idx: (neck[idx] - a0).dot(neck[idx] - a0)
    i = min(on_right, key=near)
    j = min(on_left, key=near)
    # walk the necklace boundary from the right touch point to the left one
    # along the side facing A_0 (clockwise around the necklace)
    chain = [neck[i]]
    k = i
    while k != j:
        k = (k - 1) % m
        chain.append(neck[k])
    if any(orient(a0, chain[q], chain[q + 1]) <= 0 for q in range(len(chain) - 1)):
        raise AssertionError("necklace chain is not visible from the wedge tip")
    return [ConvexPolygon([a0, chain[q], chain[q + 1]]) for q in range(len(chain) - 1)]


@dataclass
class FoldedPiece:
    motion: Isometry
    region: Region
    vertex: int
    shift: int

    @property
    def angle(self) -> int:
        return self.motion.angle

    @property
    def center(self) -> Point:
        return self.motion.fixed_point()


def folded_pieces(t: BilliardTable, domain: Sequence[ConvexPolygon]) -> list[FoldedPiece]:
    """Continuity pieces of the quotient map on a fundamental domain.

    A point of ``D_i`` is reflected through ``A_i`` and rotated back by the
    unique ``R^-k`` that returns it to the domain; each (i, k) cell is one
    piece, a rotation by ``180 - k*360/n`` degrees.
    """
    vs = t.vertices
    cells: dict[tuple[int, int], list[ConvexPolygon]] = {}
    motions: dict[tuple[int, int], Isometry] = {}
    for part in domain:
        for i in range(t.n):
            l1, l2 = wedge_lines(t, i)
            d_i = clip(clip(part, l1), l2)
            if d_i is None or d_i.degenerate:
                continue
            refl = Isometry.point_reflection(vs[i])
            for k in range(t.n):
                rk = t.rotation(k)
                for q in domain:
                    cell = intersect(d_i, refl(rk(q)))
                    if cell is None or cell.degenerate:
                        continue
                    cells.setdefault((i, k), []).append(cell)
                    motions[(i, k)] = t.rotation(-k).compose(refl)
    out = [FoldedPiece(motions[key], Region(cells[key]), key[0], key[1]) for key in sorted(cells)]
    return out


class BoundaryPoint(ValueError):
    """Raised when a piecewise map is asked to act on a piece boundary."""

    def __init__(self, point: Point):
        super().__init__(f"{point!r} lies on a piece boundary")
        self.point = point


class PiecewiseMap:
    """A map given by rigid motions on regions with disjoint interiors.

    Only interior points of pieces are mapped; the boundary is where the map
    is undefined.
    """

    def __init__(self, pieces: Sequence[tuple[str, Region, Isometry]]):
        self.pieces = [(name, Region.of(reg), mot) for name, reg, mot in pieces]

    def locate(self, x: Point) -> int:
        for k, (_, reg, _) in enumerate(self.pieces):
            loc = reg.contains(x)
            if loc is Location.INTERIOR:
                return k
            if loc is Location.BOUNDARY:
                raise BoundaryPoint(x)
        raise BoundaryPoint(x)

    def apply(self, x: Point) -> tuple[str, Point]:
        name, _, mot = self.pieces[self.locate(x)]
        return name, mot(x)

    def first_return(self, x: Point, target: Region, budget: int = 1_000_000) -> tuple[list[str], Point]:
        """Iterate from ``x`` until the image lands in the interior of ``target``.

        Returns the word of piece names and the landing point.  Landing on the
        target boundary counts as undefined.
        """
        word = []
        y = x
        while len(word) < budget:
            name, y = self.apply(y)
            word.append(name)
            loc = target.contains(y)
            if loc is Location.INTERIOR:
                return word, y
            if loc is Location.BOUNDARY:
                raise BoundaryPoint(y)
        raise RuntimeError(f"no return within {budget} steps")

    def cycle(self, x: Point, budget: int = 1_000_000) -> list[str]:
        """Word of the periodic orbit of ``x`` (raises if none within budget)."""
        word = []
        y = x
        while len(word) < budget:
            name, y = self.apply(y)
            word.append(name)
            if y == x:
                return word
        raise RuntimeError(f"{x!r} not periodic within {budget} steps")


# -- lattice censuses ------------------------------------------------------------

# Periods of the components counted at one level, per lattice table.
_LEVEL_PERIODS: dict[str, Callable[[int], tuple[int, ...]]] = {
    "square": lambda d: (4 * d,),
    "hexagon_lattice": lambda l: (12 * l - 6,),
    "triangle_lattice": lambda l: (12 * l - 6, 12 * l),
}
# Half-width of a box (around the origin) holding every component of a level.
_LEVEL_REACH: dict[str, Callable[[int], int]] = {
    "square": lambda d: d + 2,
    "hexagon_lattice": lambda l: 4 * l + 3,
    "triangle_lattice": lambda l: 2 * l + 3,
}


@dataclass
class OrbitClass:
    shape: int  # side count of the components
    size: int  # number of components in the orbit
    period: int
    components: list[ConvexPolygon] = field(repr=False, default_factory=list)


@dataclass
class Census:
    table: str
    level: int
    orbits: list[OrbitClass]

    def summary(self) -> list[tuple[int, int, int]]:
        """(side count, orbit size, period) per orbit, sorted."""
        return sorted((o.shape, o.size, o.period) for o in self.orbits)

    def count(self, shape: int) -> int:
        return sum(o.size for o in self.orbits if o.shape == shape)


def level_periods(name: str, level: int) -> tuple[int, ...]:
    """Periods of the components that make up one level of a lattice table.

    Square: the Manhattan ring ``d`` has period ``4d``.  Hexagon: triangles
    and hexagons of period ``12 level - 6``.  Triangle: hexagons of period
    ``12 level - 6`` and triangles of period ``12 level``.
    """
    if name not in _LEVEL_PERIODS:
        raise ValueError(f"{name!r} is not a lattice table")
    if level < 1:
        raise ValueError("level must be positive")
    return _LEVEL_PERIODS[name](level)


def lattice_census(t: BilliardTable, level: int, step_denominator: int = 3) -> Census:
    """Periodic components of one level, grouped into orbits.

    Seeds are exact grid points of spacing ``1/step_denominator`` inside the
    regions ``D_0`` and ``D_1``.  An orbit can skip every other vertex (the
    centres of the hexagon orbits do) but never two neighbours, and the
    components are lattice polygons, so each orbit holds such a point.  Each
    new component is propagated by reflecting the whole polygon until the
    orbit closes.
    """
    if t.kind != "lattice-affine" and t.name != "square":
        raise ValueError("census needs a lattice table")
    periods = level_periods(t.name, level)
    reach = _LEVEL_REACH[t.name](level)
    wedges = [wedge_lines(t, 0), wedge_lines(t, 1)]
    eps_x, eps_y = Fraction(1, 997), Fraction(1, 1009)
    known: list[ConvexPolygon] = []
    orbits: list[OrbitClass] = []
    q = step_denominator
    for a in range(-q * reach, q * reach + 1):
        for b in range(-q * reach, q * reach + 1):
            x = Point(Fraction(a, q) + eps_x, Fraction(b, q) + eps_y)
            if not any(l1.side(x) > 0 and l2.side(x) > 0 for l1, l2 in wedges):
                continue
            if any(_strictly_inside(c, x) for c in known):
                continue
            res = orbit(t, x, max(periods))
            if not res.is_periodic or res.period not in periods:
                continue
            comp = component_of(t, x, res=res)
            members = _propagate(t, comp.region)
            known.extend(members)
            orbits.append(OrbitClass(len(comp.region), len(members), comp.period, members))
    return Census(t.name, level, orbits)


def _strictly_inside(poly: ConvexPolygon, x: Point) -> bool:
    return all(e.side(x) > 0 for e in poly.edges())


def _propagate(t: BilliardTable, region: ConvexPolygon) -> list[ConvexPolygon]:
    """Images of a periodic component under T until it comes back."""
    out = [region]
    cur = region
    while True:
        i = tangent_vertex(t, cur.centroid())
        cur = _reflect_poly(t.vertices[i], cur)
        if cur == region:
            return out
        out.append(cur)


# -- plane scans -------------------------------------------------------------------


@dataclass
class ScanGrid:
    """Orbit classification of the exact centres of a grid of cells.

    ``labels[j][i]`` is the cell in column ``i`` and row ``j`` (row 0 on
    top).  A label is ``("table",)``, ``("finite", k)``, ``("periodic", p)``
    or ``("budget", n)``.
    """

    window: tuple[Fraction, Fraction, Fraction, Fraction]
    resolution: tuple[int, int]
    budget: int
    labels: list[list[tuple]]

    def cell_center(self, i: int, j: int) -> Point:
        return _cell_center(self.window, self.resolution, i, j)

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for row in self.labels:
            for lab in row:
                out[lab[0]] = out.get(lab[0], 0) + 1
        return out

    def gray(self, lab: tuple) -> int:
        """Grey level of a label: table black, finite white, unknown mid-grey, periods banded."""
        kind = lab[0]
        if kind == "table":
            return 0
        if kind == "finite":
            return 255
        if kind == "budget":
            return 128
        return 16 + (lab[1] * 37) % 96 + (0 if lab[1] % 2 else 120)

    def to_pgm(self) -> bytes:
        w, h = self.resolution
        head = f"P5\n{w} {h}\n255\n".encode("ascii")
        return head + bytes(self.gray(lab) for row in self.labels for lab in row)


def _cell_center(window, resolution, i: int, j: int) -> Point:
    x0, y0, x1, y1 = window
    w, h = resolution
    return Point(x0 + (x1 - x0) * Fraction(2 * i + 1, 2 * w), y1 - (y1 - y0) * Fraction(2 * j + 1, 2 * h))


def _classify(t: BilliardTable, window, resolution, i: int, j: int, budget: int) -> tuple:
    x = _cell_center(window, resolution, i, j)
    # a cell meeting the table in positive area is marked apart from orbit outcomes
    if _in_closed_table(t, x) or _meets(_cell(window, resolution, i, j), t):
        return ("table",)
    res = orbit(t, x, budget)
    if res.outcome == "periodic":
        return ("periodic", res.steps)
    if res.outcome == "finite":
        return ("finite", res.steps)
    return ("budget", res.steps)


def _meets(cell: tuple, t: BilliardTable) -> bool:
    left, bottom, right, top = cell
    vs = t.vertices
    if max(v.x for v in vs) <= left or min(v.x for v in vs) >= right:
        return False
    if max(v.y for v in vs) <= bottom or min(v.y for v in vs) >= top:
        return False
    rect = ConvexPolygon([Point(left, bottom), Point(right, bottom), Point(right, top), Point(left, top)])
    inter = intersect(rect, t.polygon)
    return inter is not None and inter.area2() > 0


def _cell(window, resolution, i: int, j: int) -> tuple:
    """(left, bottom, right, top) of a cell, row 0 on top."""
    x0, y0, x1, y1 = window
    w, h = resolution
    dx, dy = (x1 - x0) / w, (y1 - y0) / h
    left, top = x0 + i * dx, y1 - j * dy
    return left, top - dy, left + dx, top


def _in_closed_table(t: BilliardTable, x: Point) -> bool:
    n = t.n
    return all(orient(t.vertices[k], t.vertices[(k + 1) % n], x) >= 0 for k in range(n))


def _scan_rows(args) -> list[list[tuple]]:
    t, window, resolution, budget, rows = args
    w = resolution[0]
    return [
        [_classify(t, window, resolution, i, j, budget) for i in range(w)]
        for j in rows
    ]


def scan_classify(t: BilliardTable, window, resolution: tuple[int, int], budget: int = 10_000, workers: int = 1) -> ScanGrid:
    """Classify the centre of every cell of ``window`` = (x0, y0, x1, y1).

    Rows are split into contiguous blocks for ``workers`` processes and
    reassembled in row order, so the grid does not depend on ``workers``.
    """
    x0, y0, x1, y1 = (Fraction(v) for v in window)
    if not (x0 < x1 and y0 < y1):
        raise ValueError("window must have positive width and height")
    w, h = resolution
    if w < 1 or h < 1:
        raise ValueError("resolution must be positive")
    win = (x0, y0, x1, y1)
    workers = max(1, min(workers, h))
    if workers == 1:
        labels = _scan_rows((t, win, resolution, budget, range(h)))
    else:
        from concurrent.futures import ProcessPoolExecutor

        size = -(-h // (workers * 4))
        blocks = [range(s, min(h, s + size)) for s in range(0, h, size)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_scan_rows, [(t, win, resolution, budget, blk) for blk in blocks]))
        labels = [row for part in parts for row in part]
    return ScanGrid(win, (w, h), budget, labels)


# -- invariant suite -------------------------------------------------------------------

INVARIANT_NAMES = (
    "types_invariant",
    "periodic_neighbourhood",
    "even_period",
    "double_step_translation",
    "sides_parallel",
    "lattice_nondegenerate",
)


def random_outside_point(t: BilliardTable, rng, reach: int = 4, denominator: int = 97) -> Point:
    """A random rational point strictly outside the table, within ``reach`` of the origin."""
    while True:
        x = Point(Fraction(rng.randint(-reach * denominator, reach * denominator), denominator),
                  Fraction(rng.randint(-reach * denominator, reach * denominator), denominator))
        if any(orient(t.vertices[k], t.vertices[(k + 1) % t.n], x) < 0 for k in range(t.n)):
            return x


def _parallel_to_side(t: BilliardTable, a: Point, b: Point) -> bool:
    d = b - a
    for k in range(t.n):
        e = t.vertices[(k + 1) % t.n] - t.vertices[k]
        if d.x * e.y - d.y * e.x == 0:
            return True
    return False


def check_invariants(t: BilliardTable, samples: int = 20, seed: int = 0, budget: int = 5_000, max_period: int = 400) -> dict[str, list[str]]:
    """Run the basic structural properties of the map on random exact points.

    Returns, per property name, the list of failure descriptions (empty
    lists mean the property held on every sample).
    """
    import random

    rng = random.Random(seed)
    fails: dict[str, list[str]] = {k: [] for k in INVARIANT_NAMES}
    checked_periodic = 0
    tries = 0
    while checked_periodic < samples and tries < 50 * samples:
        tries += 1
        x = random_outside_point(t, rng)
        res = orbit(t, x, budget)
        # invariance of the type under one step
        try:
            y = step(t, x)
        except UndefinedOnRay:
            if res.outcome != "finite" or res.steps != 0:
                fails["types_invariant"].append(f"{x!r}: undefined step but {res.label()}")
            continue
        res2 = orbit(t, y, budget)
        expected = {
            "periodic": ("periodic", res.steps),
            "finite": ("finite", res.steps - 1),
            "budget": ("budget", budget),
        }[res.outcome]
        if res.outcome == "budget":
            ok = res2.outcome == "budget" or (res2.outcome == "finite" and res2.steps == budget - 1)
        else:
            ok = (res2.outcome, res2.steps) == expected
        if not ok:
            fails["types_invariant"].append(f"{x!r}: {res.label()} then {res2.label()}")
        # the double step is a translation by twice a chord of the table
        if len(res.itinerary) >= 2:
            i, j = res.itinerary[0], res.itinerary[1]
            z = step(t, y)
            chord = t.vertices[j] - t.vertices[i]
            if i == j or z - x != chord.scale(2):
                fails["double_step_translation"].append(f"{x!r}: vertices {i},{j}")
        if not res.is_periodic or res.steps > max_period:
            continue
        checked_periodic += 1
        comp = component_of(t, x, res=res)
        poly = comp.region
        if comp.period % 2:
            fails["even_period"].append(f"{x!r}: component period {comp.period}")
        if comp.center_special and res.steps * 2 != comp.period:
            fails["even_period"].append(f"{x!r}: centre period {res.steps} vs {comp.period}")
        if len(poly) < 3 or poly.area2() <= 0:
            if t.kind == "lattice-affine" or t.name == "square":
                fails["lattice_nondegenerate"].append(f"{x!r}: degenerate component")
            continue
        vs = poly.vertices
        for a, b in zip(vs, vs[1:] + vs[:1]):
            if not _parallel_to_side(t, a, b):
                fails["sides_parallel"].append(f"{x!r}: edge {a!r}-{b!r}")
        for _ in range(3):
            p = interior_sample(poly, rng)
            r = orbit(t, p, budget)
            if r.itinerary[: len(res.itinerary)] != res.itinerary or r.steps not in (comp.period, comp.period // 2):
                fails["periodic_neighbourhood"].append(f"{x!r}: neighbour {p!r} gives {r.label()}")
    return fails
