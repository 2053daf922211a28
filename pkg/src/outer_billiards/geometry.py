"""Exact planar primitives: points, directed lines, convex polygons, rigid motions.

Every coordinate is a :class:`~outer_billiards.exactfield.QuadExt`; no
predicate ever touches a float.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exactfield import ONE, ZERO, QuadExt, from_json, to_json

__all__ = [
    "Point",
    "Line",
    "ConvexPolygon",
    "Isometry",
    "Similarity",
    "Region",
    "Similitude",
    "Location",
    "orient",
    "cross",
    "clip",
    "intersect",
    "contains",
    "apply",
    "cos_sin",
    "pt",
    "interior_sample",
]


def _q(v) -> QuadExt:
    return v if isinstance(v, QuadExt) else QuadExt(Fraction(v))


class Point:
    """A point with exact coordinates in one quadratic field."""

    __slots__ = ("x", "y")

    def __init__(self, x, y):
        self.x = _q(x)
        self.y = _q(y)

    def __add__(self, other: "Point") -> "Point":
        return Point(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point") -> "Point":
        return Point(self.x - other.x, self.y - other.y)

    def __neg__(self) -> "Point":
        return Point(-self.x, -self.y)

    def scale(self, k) -> "Point":
        return Point(self.x * k, self.y * k)

    def __eq__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        return self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.x, self.y))

    def __iter__(self):
        yield self.x
        yield self.y

    def __repr__(self):
        return f"Point({self.x}, {self.y})"

    def dot(self, other: "Point") -> QuadExt:
        return self.x * other.x + self.y * other.y

    def to_json(self) -> list:
        return [to_json(self.x), to_json(self.y)]

    @classmethod
    def from_json(cls, obj) -> "Point":
        return cls(from_json(obj[0]), from_json(obj[1]))

    def floats(self) -> tuple[float, float]:
        return float(self.x), float(self.y)


def pt(x, y) -> Point:
    return Point(x, y)


def cross(u: Point, v: Point) -> QuadExt:
    return u.x * v.y - u.y * v.x


def orient(a: Point, b: Point, c: Point) -> int:
    """Sign of ``cross(b - a, c - a)``: +1 for a left turn, -1 right, 0 collinear."""
    return ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)).sign()


@dataclass(frozen=True)
class Line:
    """Directed line through ``p`` and ``q``; the closed left side is kept by :func:`clip`."""

    p: Point
    q: Point

    def side(self, x: Point) -> int:
        return orient(self.p, self.q, x)

    def value(self, x: Point) -> QuadExt:
        return cross(self.q - self.p, x - self.p)

    def reversed(self) -> "Line":
        return Line(self.q, self.p)


class Location(enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"


class ConvexPolygon:
    """Counterclockwise convex vertex chain; may degenerate to a segment or a point.

    Consecutive collinear and repeated vertices are removed at construction,
    so the chain is strictly convex.
    """

    __slots__ = ("vertices", "_area2")

    def __init__(self, vertices: Iterable[Point], *, check: bool = False):
        vs = _simplify(list(vertices))
        self.vertices: tuple[Point, ...] = tuple(vs)
        self._area2 = None
        if check:
            self.validate()

    def validate(self) -> None:
        vs = self.vertices
        if not vs:
            raise ValueError("empty polygon")
        n = len(vs)
        if n >= 3:
            for i in range(n):
                if orient(vs[i], vs[(i + 1) % n], vs[(i + 2) % n]) <= 0:
                    raise ValueError("vertices are not strictly convex and counterclockwise")

    @property
    def kind(self) -> str:
        n = len(self.vertices)
        return "polygon" if n >= 3 else ("segment" if n == 2 else "point")

    @property
    def degenerate(self) -> bool:
        return len(self.vertices) < 3

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def edges(self) -> list[Line]:
        vs = self.vertices
        return [Line(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def area2(self) -> QuadExt:
        """Twice the signed area (shoelace), exact."""
        if self._area2 is None:
            vs = self.vertices
            s = ZERO
            for i in range(len(vs)):
                a, b = vs[i], vs[(i + 1) % len(vs)]
                s = s + (a.x * b.y - a.y * b.x)
            self._area2 = s
        return self._area2

    def area(self) -> QuadExt:
        return self.area2() * Fraction(1, 2)

    def centroid(self) -> Point:
        """Vertex average; strictly interior for a non-degenerate polygon."""
        n = len(self.vertices)
        sx = ZERO
        sy = ZERO
        for v in self.vertices:
            sx = sx + v.x
            sy = sy + v.y
        k = Fraction(1, n)
        return Point(sx * k, sy * k)

    def canonical(self) -> tuple:
        """Rotation-normalised vertex tuple (starts at the lexicographically smallest vertex)."""
        vs = self.vertices
        i = min(range(len(vs)), key=lambda j: (vs[j].x, vs[j].y))
        return vs[i:] + vs[:i]

    def sort_key(self) -> tuple:
        return tuple((v.x.a, v.x.b, v.y.a, v.y.b) for v in self.canonical())

    def same_set(self, other: "ConvexPolygon") -> bool:
        return self.canonical() == other.canonical()

    def __eq__(self, other):
        if not isinstance(other, ConvexPolygon):
            return NotImplemented
        return len(self) == len(other) and self.same_set(other)

    def __hash__(self):
        return hash(self.canonical())

    def __repr__(self):
        return f"ConvexPolygon({list(self.vertices)!r})"

    def angles_deg(self) -> list[float]:
        """Interior angles in degrees (render/diagnostic only)."""
        import math

        vs = [v.floats() for v in self.vertices]
        out = []
        n = len(vs)
        for i in range(n):
            a, b, c = vs[i - 1], vs[i], vs[(i + 1) % n]
            u = (a[0] - b[0], a[1] - b[1])
            v = (c[0] - b[0], c[1] - b[1])
            ang = math.degrees(math.atan2(u[0] * v[1] - u[1] * v[0], u[0] * v[0] + u[1] * v[1]))
            out.append(round(abs(ang), 6))
        return out

    def side_lengths2(self) -> list[QuadExt]:
        vs = self.vertices
        out = []
        for i in range(len(vs)):
            e = vs[(i + 1) % len(vs)] - vs[i]
            out.append(e.dot(e))
        return out

    def to_json(self) -> list:
        return [v.to_json() for v in self.vertices]

    @classmethod
    def from_json(cls, obj) -> "ConvexPolygon":
        return cls(Point.from_json(p) for p in obj)


def _simplify(vs: list[Point]) -> list[Point]:
    out: list[Point] = []
    for v in vs:
        if not out or out[-1] != v:
            out.append(v)
    while len(out) > 1 and out[0] == out[-1]:
        out.pop()
    if len(out) < 3:
        return out
    a = out[0]
    far = max(out, key=lambda v: (v - a).dot(v - a))
    if all(orient(a, far, v) == 0 for v in out):
        # flat chain: keep the two extreme points
        d = far - a
        lo = min(out, key=lambda v: (v - a).dot(d))
        hi = max(out, key=lambda v: (v - a).dot(d))
        return [lo, hi]
    i = 0
    while len(out) >= 3 and i < len(out):
        n = len(out)
        if orient(out[i - 1], out[i], out[(i + 1) % n]) == 0:
            del out[i]
            i = max(i - 1, 0)
        else:
            i += 1
    return out


def clip(poly: ConvexPolygon | None, line: Line) -> ConvexPolygon | None:
    """Intersect a convex polygon with the closed half-plane left of ``line``.

    Returns ``None`` for an empty intersection; the result may be a segment
    or a single point when the line only touches the polygon.
    """
    if poly is None:
        return None
    vs = poly.vertices
    p0, q0 = line.p, line.q
    dx = q0.x - p0.x
    dy = q0.y - p0.y
    vals = [dx * (v.y - p0.y) - dy * (v.x - p0.x) for v in vs]
    signs = [v.sign() for v in vals]
    if all(s >= 0 for s in signs):
        return poly
    if all(s < 0 for s in signs):
        return None
    n = len(vs)
    if n == 1:
        return poly if signs[0] >= 0 else None
    if n == 2:
        a, b = vs
        t = vals[0] / (vals[0] - vals[1])
        cut = Point(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t)
        return ConvexPolygon([a, cut] if signs[0] >= 0 else [cut, b])
    out: list[Point] = []
    for i in range(n):
        j = (i + 1) % n
        a, b = vs[i], vs[j]
        sa, sb = signs[i], signs[j]
        if sa >= 0:
            out.append(a)
        if (sa > 0 and sb < 0) or (sa < 0 and sb > 0):
            t = vals[i] / (vals[i] - vals[j])
            out.append(Point(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t))
    if not out:
        return None
    return ConvexPolygon(out)


def intersect(a: ConvexPolygon | None, b: ConvexPolygon | None) -> ConvexPolygon | None:
    if a is None or b is None:
        return None
    if b.degenerate:
        a, b = b, a
        if b.degenerate:
            raise ValueError("intersection of two degenerate polygons is not supported")
    out = a
    for e in b.edges():
        out = clip(out, e)
        if out is None:
            return None
    return out


def contains(poly: ConvexPolygon, p: Point) -> Location:
    vs = poly.vertices
    if len(vs) < 3:
        raise ValueError("containment is defined for non-degenerate polygons")
    on_edge = False
    for i in range(len(vs)):
        s = orient(vs[i], vs[(i + 1) % len(vs)], p)
        if s < 0:
            return Location.EXTERIOR
        if s == 0:
            on_edge = True
    return Location.BOUNDARY if on_edge else Location.INTERIOR


# -- rigid motions ---------------------------------------------------------

_H = Fraction(1, 2)


def cos_sin(deg: int) -> tuple[QuadExt, QuadExt]:
    """Exact cosine and sine of an angle that is a multiple of 30 or 45 degrees."""
    deg %= 360
    if deg % 90 == 0:
        table = {0: (1, 0), 90: (0, 1), 180: (-1, 0), 270: (0, -1)}
        c, s = table[deg]
        return QuadExt(c), QuadExt(s)
    if deg % 45 == 0:
        r = QuadExt(0, _H, 2)
        k = deg // 45  # odd
        sx = 1 if k in (1, 7) else -1
        sy = 1 if k in (1, 3) else -1
        return r * sx, r * sy
    if deg % 30 == 0:
        half = QuadExt(_H)
        r3 = QuadExt(0, _H, 3)
        table = {
            30: (r3, half),
            60: (half, r3),
            120: (-half, r3),
            150: (-r3, half),
            210: (-r3, -half),
            240: (-half, -r3),
            300: (half, -r3),
            330: (r3, -half),
        }
        return table[deg]
    raise ValueError(f"rotation by {deg} degrees is not representable")


class Isometry:
    """Orientation-preserving motion ``p -> R(angle) p + t``."""

    __slots__ = ("angle", "c", "s", "t")

    def __init__(self, angle: int, t: Point | None = None):
        self.angle = angle % 360
        self.c, self.s = cos_sin(self.angle)
        self.t = t if t is not None else Point(ZERO, ZERO)

    @classmethod
    def identity(cls) -> "Isometry":
        return cls(0)

    @classmethod
    def translation(cls, v: Point) -> "Isometry":
        return cls(0, v)

    @classmethod
    def rotation(cls, angle: int, center: Point | None = None) -> "Isometry":
        """Counterclockwise rotation by ``angle`` degrees about ``center``."""
        rot = cls(angle)
        if center is None:
            return rot
        return cls(angle, center - rot.linear(center))

    @classmethod
    def point_reflection(cls, center: Point) -> "Isometry":
        return cls(180, center.scale(2))

    def linear(self, p: Point) -> Point:
        c, s = self.c, self.s
        if self.angle == 0:
            return p
        if self.angle == 180:
            return Point(-p.x, -p.y)
        return Point(c * p.x - s * p.y, s * p.x + c * p.y)

    def __call__(self, g):
        return apply(self, g)

    def compose(self, inner: "Isometry") -> "Isometry":
        """``self o inner``: first ``inner``, then ``self``."""
        return Isometry(self.angle + inner.angle, self.linear(inner.t) + self.t)

    __matmul__ = compose

    def inverse(self) -> "Isometry":
        inv = Isometry(-self.angle)
        return Isometry(-self.angle, -inv.linear(self.t))

    def fixed_point(self) -> Point:
        """Center of a non-trivial rotation."""
        if self.angle == 0:
            raise ValueError("a translation has no fixed point")
        # (I - R) p = t
        a = ONE - self.c
        b = self.s
        det = a * a + b * b
        tx, ty = self.t.x, self.t.y
        return Point((a * tx - b * ty) / det, (b * tx + a * ty) / det)

    def __eq__(self, other):
        if not isinstance(other, Isometry):
            return NotImplemented
        return self.angle == other.angle and self.t == other.t

    def __hash__(self):
        return hash((self.angle, self.t))

    def __repr__(self):
        return f"Isometry(angle={self.angle}, t={self.t!r})"


def apply(iso: Isometry, g):
    if isinstance(g, Point):
        return iso.linear(g) + iso.t
    if isinstance(g, ConvexPolygon):
        return ConvexPolygon(iso.linear(v) + iso.t for v in g.vertices)
    if isinstance(g, Region):
        return g.map(iso)
    raise TypeError(f"cannot apply an isometry to {type(g).__name__}")


class Similarity:
    """Homothety ``p -> center + k (p - center)`` with ``k > 0``."""

    __slots__ = ("center", "k")

    def __init__(self, center: Point, k):
        self.center = center
        self.k = _q(k)
        if self.k.sign() <= 0:
            raise ValueError("scale factor must be positive")

    def __call__(self, g):
        if isinstance(g, Point):
            return self.center + (g - self.center).scale(self.k)
        if isinstance(g, ConvexPolygon):
            return ConvexPolygon(self(v) for v in g.vertices)
        if isinstance(g, Region):
            return g.map(self)
        if isinstance(g, (list, tuple)):
            return type(g)(self(x) for x in g)
        raise TypeError(f"cannot scale {type(g).__name__}")

    def inverse(self) -> "Similarity":
        return Similarity(self.center, ONE / self.k)

    def __repr__(self):
        return f"Similarity(center={self.center!r}, k={self.k})"


class Region:
    """A polygonal region stored as convex parts with disjoint interiors.

    ``outline`` is the boundary as one or more closed vertex cycles
    (counterclockwise around the region, collinear vertices removed); for a
    simply connected region there is exactly one cycle.
    """

    __slots__ = ("parts", "_outline")

    def __init__(self, parts: Iterable[ConvexPolygon]):
        self.parts: tuple[ConvexPolygon, ...] = tuple(p for p in parts if not p.degenerate)
        if not self.parts:
            raise ValueError("a region needs at least one non-degenerate part")
        self._outline = None

    @classmethod
    def of(cls, g) -> "Region":
        if isinstance(g, Region):
            return g
        if isinstance(g, ConvexPolygon):
            return cls([g])
        return cls(g)

    def area(self) -> QuadExt:
        s = ZERO
        for p in self.parts:
            s = s + p.area()
        return s

    @property
    def outline(self) -> list[tuple[Point, ...]]:
        if self._outline is None:
            self._outline = _outline(self.parts)
        return self._outline

    @property
    def side_count(self) -> int:
        return sum(len(c) for c in self.outline)

    @property
    def vertices(self) -> tuple[Point, ...]:
        cycles = self.outline
        return cycles[0] if len(cycles) == 1 else tuple(v for c in cycles for v in c)

    def __len__(self):
        return self.side_count

    def is_convex(self) -> bool:
        cycles = self.outline
        if len(cycles) != 1:
            return False
        c = cycles[0]
        n = len(c)
        return all(orient(c[i - 1], c[i], c[(i + 1) % n]) > 0 for i in range(n))

    def as_convex(self) -> ConvexPolygon:
        if not self.is_convex():
            raise ValueError("region is not convex")
        return ConvexPolygon(self.outline[0])

    def contains(self, p: Point) -> Location:
        """Interior, boundary or exterior, judged against the outline."""
        found_boundary = False
        for part in self.parts:
            loc = contains(part, p)
            if loc is Location.INTERIOR:
                return loc
            if loc is Location.BOUNDARY:
                found_boundary = True
        if not found_boundary:
            return Location.EXTERIOR
        for cyc in self.outline:
            n = len(cyc)
            for i in range(n):
                a, b = cyc[i], cyc[(i + 1) % n]
                if orient(a, b, p) == 0 and (p - a).dot(p - b).sign() <= 0:
                    return Location.BOUNDARY
        return Location.INTERIOR

    def sample_point(self) -> Point:
        """An interior point: the vertex average of the largest part."""
        return max(self.parts, key=lambda q: q.area()).centroid()

    def map(self, f) -> "Region":
        return Region(f(p) for p in self.parts)

    def sort_key(self) -> tuple:
        return min(p.sort_key() for p in self.parts)

    def same_set(self, other: "Region") -> bool:
        if self.area() != other.area():
            return False
        a = sorted((tuple(c) for c in _canon_cycles(self.outline)), key=repr)
        b = sorted((tuple(c) for c in _canon_cycles(other.outline)), key=repr)
        return a == b

    def to_json(self) -> list:
        return [[v.to_json() for v in c] for c in self.outline]

    def __repr__(self):
        return f"Region({self.outline!r})"


def _canon_cycles(cycles):
    out = []
    for c in cycles:
        i = min(range(len(c)), key=lambda j: (c[j].x, c[j].y))
        out.append(c[i:] + c[:i])
    return out


def _outline(parts: Sequence[ConvexPolygon]) -> list[tuple[Point, ...]]:
    # split every edge at vertices of other parts lying on it, then cancel
    # opposite directed segments; what is left is the boundary
    verts = {v for p in parts for v in p.vertices}
    segs: dict[tuple[Point, Point], int] = {}
    for p in parts:
        vs = p.vertices
        for i in range(len(vs)):
            a, b = vs[i], vs[(i + 1) % len(vs)]
            d = b - a
            dd = d.dot(d)
            inner = []
            for v in verts:
                if v == a or v == b or orient(a, b, v) != 0:
                    continue
                s = (v - a).dot(d)
                if s.sign() > 0 and s < dd:
                    inner.append((s, v))
            inner.sort(key=lambda sv: sv[0])
            chain = [a] + [v for _, v in inner] + [b]
            for u, w in zip(chain, chain[1:]):
                segs[(u, w)] = segs.get((u, w), 0) + 1
    boundary = {}
    for (u, w), k in segs.items():
        if (w, u) in segs:
            continue
        boundary.setdefault(u, []).append(w)
    cycles = []
    used = set()
    for start in sorted(boundary, key=lambda p: (p.x, p.y)):
        for nxt in boundary[start]:
            if (start, nxt) in used:
                continue
            cyc = [start]
            u, w = start, nxt
            while True:
                used.add((u, w))
                if w == start:
                    break
                cyc.append(w)
                cands = [x for x in boundary[w] if (w, x) not in used]
                if len(cands) > 1:
                    # pinch point: take the sharpest left turn to keep cycles simple
                    cands.sort(key=lambda x: _turn_key(u, w, x))
                u, w = w, cands[0]
            cycles.append(tuple(_drop_collinear(cyc)))
    return cycles


def _turn_key(u: Point, w: Point, x: Point):
    import math

    a = (w - u).floats()
    b = (x - w).floats()
    return -math.atan2(a[0] * b[1] - a[1] * b[0], a[0] * b[0] + a[1] * b[1])


def _drop_collinear(cyc: list[Point]) -> list[Point]:
    out = list(cyc)
    i = 0
    while len(out) > 3 and i < len(out):
        n = len(out)
        if orient(out[i - 1], out[i], out[(i + 1) % n]) == 0:
            del out[i]
            i = max(i - 1, 0)
        else:
            i += 1
    return out


class Similitude:
    """Orientation-preserving similarity ``p -> (a*x - b*y, b*x + a*y) + t``.

    ``a + ib`` is the complex multiplier, so the scale factor is
    ``sqrt(a**2 + b**2)``.
    """

    __slots__ = ("a", "b", "t")

    def __init__(self, a, b, t: Point | None = None):
        self.a = _q(a)
        self.b = _q(b)
        if not self.a and not self.b:
            raise ValueError("degenerate similitude")
        self.t = t if t is not None else Point(ZERO, ZERO)

    @classmethod
    def homothety(cls, center: Point, k) -> "Similitude":
        k = _q(k)
        return cls(k, ZERO, center - center.scale(k))

    @classmethod
    def from_isometry(cls, iso: Isometry) -> "Similitude":
        return cls(iso.c, iso.s, iso.t)

    @classmethod
    def mapping(cls, p0: Point, p1: Point, q0: Point, q1: Point) -> "Similitude":
        """The similitude sending ``p0 -> q0`` and ``p1 -> q1``."""
        u = p1 - p0
        v = q1 - q0
        den = u.dot(u)
        a = (v.x * u.x + v.y * u.y) / den
        b = (v.y * u.x - v.x * u.y) / den
        s = cls(a, b)
        return cls(a, b, q0 - s.linear(p0))

    def linear(self, p: Point) -> Point:
        return Point(self.a * p.x - self.b * p.y, self.b * p.x + self.a * p.y)

    def __call__(self, g):
        if isinstance(g, Point):
            return self.linear(g) + self.t
        if isinstance(g, ConvexPolygon):
            return ConvexPolygon(self(v) for v in g.vertices)
        if isinstance(g, Region):
            return g.map(self)
        if isinstance(g, (list, tuple)):
            return type(g)(self(x) for x in g)
        raise TypeError(f"cannot map {type(g).__name__}")

    @property
    def scale2(self) -> QuadExt:
        return self.a * self.a + self.b * self.b

    def compose(self, inner) -> "Similitude":
        """``self o inner`` for another similitude or an isometry."""
        if isinstance(inner, Isometry):
            inner = Similitude.from_isometry(inner)
        a = self.a * inner.a - self.b * inner.b
        b = self.a * inner.b + self.b * inner.a
        return Similitude(a, b, self.linear(inner.t) + self.t)

    __matmul__ = compose

    def inverse(self) -> "Similitude":
        d = self.scale2
        a = self.a / d
        b = -self.b / d
        inv = Similitude(a, b)
        return Similitude(a, b, -inv.linear(self.t))

    def fixed_point(self) -> Point:
        # (I - S) p = t with S = [[a, -b], [b, a]]
        p = ONE - self.a
        q = self.b
        det = p * p + q * q
        if not det:
            raise ValueError("a translation has no fixed point")
        tx, ty = self.t.x, self.t.y
        return Point((p * tx - q * ty) / det, (q * tx + p * ty) / det)

    def __eq__(self, other):
        if not isinstance(other, Similitude):
            return NotImplemented
        return self.a == other.a and self.b == other.b and self.t == other.t

    def __hash__(self):
        return hash((self.a, self.b, self.t))

    def __repr__(self):
        return f"Similitude(a={self.a}, b={self.b}, t={self.t!r})"


def interior_sample(g, rng, spread: int = 1000) -> Point:
    """An exact interior point: a random positive convex combination of vertices.

    ``rng`` is a :class:`random.Random`; for a region one part is picked at
    random first.
    """
    if isinstance(g, Region):
        g = rng.choice(g.parts)
    vs = g.vertices
    if len(vs) < 3:
        raise ValueError("degenerate polygon has no interior")
    w = [rng.randint(1, spread) for _ in vs]
    s = sum(w)
    x = ZERO
    y = ZERO
    for v, wi in zip(vs, w):
        x = x + v.x * wi
        y = y + v.y * wi
    return Point(x / s, y / s)
