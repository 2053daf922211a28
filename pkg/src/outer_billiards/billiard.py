"""The outer billiard map around a convex polygon.

Convention: the tangency vertex of an exterior point ``x`` is the unique
vertex ``A_i`` such that every other vertex lies strictly to the left of the
ray ``x -> A_i``; the map sends ``x`` to ``2*A_i - x``.  When the only
candidate line contains a whole side, the map is undefined at ``x``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .exactfield import QuadExt, ZERO
from .geometry import ConvexPolygon, Isometry, Location, Point, contains, cos_sin

__all__ = [
    "BilliardTable",
    "UndefinedOnRay",
    "OutsideError",
    "OrbitResult",
    "Folding",
    "make_table",
    "tangent_vertex",
    "step",
    "step_back",
    "orbit",
    "folded_step",
    "TABLE_NAMES",
]

TABLE_NAMES = ("square", "triangle_lattice", "hexagon_lattice", "octagon", "dodecagon")


class OutsideError(ValueError):
    """The point is inside the table or on its boundary."""


class UndefinedOnRay(Exception):
    """The map is undefined: the point lies on the extension of a side."""

    def __init__(self, point: Point):
        super().__init__(f"outer billiard undefined at {point!r}")
        self.point = point


@dataclass(frozen=True)
class BilliardTable:
    name: str
    vertices: tuple[Point, ...]
    d: int
    kind: str  # "regular" or "lattice-affine"
    center: Point = field(default_factory=lambda: Point(0, 0))

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def polygon(self) -> ConvexPolygon:
        return ConvexPolygon(self.vertices)

    def validate(self) -> None:
        self.polygon.validate()
        if len(self.polygon) != self.n:
            raise ValueError("table has collinear vertices")
        if self.kind == "regular":
            r2 = [(v - self.center).dot(v - self.center) for v in self.vertices]
            if len(set(r2)) != 1:
                raise ValueError("regular table vertices are not concyclic")

    def rotation(self, k: int = 1) -> Isometry:
        """Symmetry rotation by ``k`` steps of ``360/n`` degrees about the center."""
        if self.kind != "regular":
            raise ValueError("only regular tables carry a rotation symmetry")
        return Isometry.rotation(k * 360 // self.n, self.center)


def _regular(name: str, n: int, d: int) -> BilliardTable:
    step_deg = 360 // n
    vs = []
    for k in range(n):
        c, s = cos_sin(k * step_deg)
        vs.append(Point(c, s))
    return BilliardTable(name, tuple(vs), d, "regular")


def make_table(name: str) -> BilliardTable:
    """Build one of the five tables studied: lattice tables use affine representatives."""
    if name == "square":
        vs = [(0, 0), (1, 0), (1, 1), (0, 1)]
        t = BilliardTable(name, tuple(Point(*v) for v in vs), 1, "regular", Point(Fraction(1, 2), Fraction(1, 2)))
    elif name == "triangle_lattice":
        vs = [(0, 0), (1, 0), (0, 1)]
        t = BilliardTable(name, tuple(Point(*v) for v in vs), 1, "lattice-affine", Point(Fraction(1, 3), Fraction(1, 3)))
    elif name == "hexagon_lattice":
        vs = [(0, 0), (1, 0), (2, 1), (2, 2), (1, 2), (0, 1)]
        t = BilliardTable(name, tuple(Point(*v) for v in vs), 1, "lattice-affine", Point(1, 1))
    elif name == "octagon":
        t = _regular(name, 8, 2)
    elif name == "dodecagon":
        t = _regular(name, 12, 3)
    else:
        raise ValueError(f"unknown table {name!r}; expected one of {TABLE_NAMES}")
    t.validate()
    return t


def _edge_signs(t: BilliardTable, x: Point) -> list[int]:
    vs = t.vertices
    n = len(vs)
    out = []
    for j in range(n):
        a = vs[j]
        b = vs[(j + 1) % n]
        out.append(((b.x - a.x) * (x.y - a.y) - (b.y - a.y) * (x.x - a.x)).sign())
    return out


def _check_outside(signs: list[int], x: Point) -> None:
    if min(signs) >= 0:
        raise OutsideError(f"{x!r} is not strictly outside the table")


def tangent_vertex(t: BilliardTable, x: Point) -> int:
    """Index of the tangency vertex; raises :class:`UndefinedOnRay` on a side extension."""
    s = _edge_signs(t, x)
    _check_outside(s, x)
    n = len(s)
    for i in range(n):
        if s[i - 1] < 0 and s[i] >= 0:
            if s[i] == 0:
                raise UndefinedOnRay(x)
            return i
    raise AssertionError("no tangency vertex found")  # unreachable for convex tables


def tangent_vertex_back(t: BilliardTable, x: Point) -> int:
    """Mirrored predicate: every other vertex strictly right of the ray ``x -> A_i``."""
    s = _edge_signs(t, x)
    _check_outside(s, x)
    n = len(s)
    for i in range(n):
        if s[i] < 0 and s[i - 1] >= 0:
            if s[i - 1] == 0:
                raise UndefinedOnRay(x)
            return i
    raise AssertionError("no tangency vertex found")


def _reflect(a: Point, x: Point) -> Point:
    return Point(a.x + a.x - x.x, a.y + a.y - x.y)


def step(t: BilliardTable, x: Point) -> Point:
    return _reflect(t.vertices[tangent_vertex(t, x)], x)


def step_back(t: BilliardTable, x: Point) -> Point:
    return _reflect(t.vertices[tangent_vertex_back(t, x)], x)


@dataclass
class OrbitResult:
    outcome: str  # "finite", "periodic" or "budget"
    steps: int
    itinerary: tuple[int, ...]
    points: list[Point] | None = None

    @property
    def period(self) -> int | None:
        return self.steps if self.outcome == "periodic" else None

    @property
    def is_periodic(self) -> bool:
        return self.outcome == "periodic"

    def label(self) -> str:
        if self.outcome == "periodic":
            return f"Periodic({self.steps})"
        if self.outcome == "finite":
            return f"Finite({self.steps})"
        return f"BudgetExceeded({self.steps})"


def iterate(t: BilliardTable, x: Point) -> Iterator[tuple[int, Point]]:
    """Yield ``(vertex, image)`` pairs until the map becomes undefined."""
    while True:
        i = tangent_vertex(t, x)
        x = _reflect(t.vertices[i], x)
        yield i, x


def orbit(t: BilliardTable, x: Point, budget: int = 1_000_000, keep_points: bool = False) -> OrbitResult:
    if budget < 1:
        raise ValueError("budget must be positive")
    vs = t.vertices
    n = len(vs)
    # validate the start point once; afterwards the map keeps points outside
    _check_outside(_edge_signs(t, x), x)
    itinerary: list[int] = []
    points = [x] if keep_points else None
    y = x
    x0x, x0y = x.x, x.y
    for k in range(budget):
        try:
            i = tangent_vertex(t, y)
        except UndefinedOnRay:
            return OrbitResult("finite", k, tuple(itinerary), points)
        a = vs[i]
        y = Point(a.x + a.x - y.x, a.y + a.y - y.y)
        itinerary.append(i)
        if points is not None:
            points.append(y)
        if y.x == x0x and y.y == x0y:
            return OrbitResult("periodic", k + 1, tuple(itinerary), points)
    return OrbitResult("budget", budget, tuple(itinerary), points)


def orbit_dump(res: OrbitResult, start: Point) -> str:
    """JSON-lines record: one line per step with the vertex used and the point reached."""
    lines = [json.dumps({"index": 0, "vertex": None, "point": start.to_json()})]
    pts = res.points or []
    for k, v in enumerate(res.itinerary):
        rec = {"index": k + 1, "vertex": v}
        if k + 1 < len(pts):
            rec["point"] = pts[k + 1].to_json()
        lines.append(json.dumps(rec))
    lines.append(json.dumps({"outcome": res.outcome, "steps": res.steps}))
    return "\n".join(lines) + "\n"


class Folding:
    """Quotient of a regular table's exterior by its rotation group.

    Sector ``k`` is the half-open wedge at the table center between the rays
    with directions ``R^k u`` (included) and ``R^(k+1) u`` (excluded), where
    ``R`` is rotation by ``360/n`` degrees and ``u`` the start direction.
    """

    def __init__(self, table: BilliardTable, start: Point | None = None):
        if table.kind != "regular":
            raise ValueError("folding needs a regular table")
        self.table = table
        self.n = table.n
        self.center = table.center
        u = start if start is not None else table.vertices[0] - table.center
        self.rays = [Isometry(k * 360 // self.n).linear(u) for k in range(self.n)]
        self.rot = [table.rotation(-k) for k in range(self.n)]

    def sector_of(self, p: Point) -> int:
        v = p - self.center
        rays = self.rays
        n = self.n
        for k in range(n):
            a = rays[k]
            b = rays[(k + 1) % n]
            if (a.x * v.y - a.y * v.x).sign() >= 0 and (b.x * v.y - b.y * v.x).sign() < 0:
                return k
        raise ValueError("the table center has no sector")

    def fold(self, p: Point) -> tuple[int, Point]:
        k = self.sector_of(p)
        return k, self.rot[k](p)


def folded_step(t: BilliardTable, x: Point, folding: Folding | None = None) -> tuple[int, Point]:
    """One step of the derived map on the fundamental sector.

    Returns ``(k, y)`` where ``y = R^(-k) T(x)`` lies in sector 0; the
    composed motion is a rotation by ``180 - k*360/n`` degrees.
    """
    folding = folding or Folding(t)
    return folding.fold(step(t, x))
