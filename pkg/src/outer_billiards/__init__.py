"""Exact outer billiards around lattice and regular polygons, with renormalization
of the regular octagon and dodecagon."""

from .billiard import BilliardTable, OrbitResult, make_table, orbit, step, step_back, tangent_vertex
from .exactfield import QuadExt, parse
from .geometry import ConvexPolygon, Point, Region
from .structure import component_of, lattice_census, return_partition, scan_classify

__all__ = [
    "BilliardTable",
    "OrbitResult",
    "make_table",
    "orbit",
    "step",
    "step_back",
    "tangent_vertex",
    "QuadExt",
    "parse",
    "ConvexPolygon",
    "Point",
    "Region",
    "component_of",
    "lattice_census",
    "return_partition",
    "scan_classify",
]
