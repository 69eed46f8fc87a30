"""Planar polygon primitives in pixel units.

Polygons are validated once on the way in and are immutable afterwards.
Intersections are delegated to shapely (GEOS); areas use the shoelace
formula on the stored rings.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import shapely
from shapely.geometry import LinearRing
from shapely.geometry import Polygon as _ShapelyPolygon

from .errors import DegenerateGeometry, GeometryError, SelfIntersection

Point = tuple[float, float]
Ring = tuple[Point, ...]

# vertices closer than this are merged
MERGE_TOL = 1e-9


def _signed_area(ring: Sequence[Point]) -> float:
    # shifted to the first vertex to limit cancellation for large coordinates
    x0, y0 = ring[0]
    s = 0.0
    n = len(ring)
    for i in range(n):
        xa, ya = ring[i]
        xb, yb = ring[(i + 1) % n]
        s += (xa - x0) * (yb - y0) - (xb - x0) * (ya - y0)
    return 0.5 * s


def _clean_ring(coords: Iterable[Sequence[float]]) -> list[Point]:
    pts: list[Point] = []
    for c in coords:
        p = (float(c[0]), float(c[1]))
        if not (math.isfinite(p[0]) and math.isfinite(p[1])):
            raise GeometryError(f"non-finite vertex {p}")
        if pts and math.dist(p, pts[-1]) < MERGE_TOL:
            continue
        pts.append(p)
    # storage never repeats the first vertex
    while len(pts) > 1 and math.dist(pts[0], pts[-1]) < MERGE_TOL:
        pts.pop()
    return pts


def _validate_ring(coords, ccw: bool, what: str) -> Ring:
    pts = _clean_ring(coords)
    if len(pts) < 3:
        raise DegenerateGeometry(f"{what} has {len(pts)} distinct vertices, need >= 3")
    x0, y0 = pts[0]
    far = max(pts, key=lambda p: (p[0] - x0) ** 2 + (p[1] - y0) ** 2)
    dx, dy = far[0] - x0, far[1] - y0
    scale = max(1.0, dx * dx + dy * dy)
    # largest distance-times-length of any vertex off the line through pts[0] and far
    off = max(abs(dx * (p[1] - y0) - dy * (p[0] - x0)) for p in pts)
    if off <= 1e-12 * scale:
        raise DegenerateGeometry(f"{what} has all vertices on one line")
    if not LinearRing(pts).is_simple:
        raise SelfIntersection(f"{what} is self-intersecting")
    a = _signed_area(pts)
    if abs(a) <= 1e-12 * scale:
        raise DegenerateGeometry(f"{what} encloses zero area")
    if (a > 0) != ccw:
        pts.reverse()
    return tuple(pts)


@dataclass(frozen=True, eq=False)
class Polygon:
    """A validated polygon: CCW exterior, CW holes, positive area.

    Construct through :func:`validate` rather than directly.
    """

    exterior: Ring
    holes: tuple[Ring, ...] = ()
    area: float = 0.0
    bounds: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    shape: _ShapelyPolygon = field(default=None, repr=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polygon):
            return NotImplemented
        return self.exterior == other.exterior and self.holes == other.holes

    def __hash__(self) -> int:
        return hash((self.exterior, self.holes))

    def translated(self, dx: float, dy: float) -> "Polygon":
        return validate(
            [(x + dx, y + dy) for x, y in self.exterior],
            [[(x + dx, y + dy) for x, y in h] for h in self.holes],
        )

    def to_coords(self) -> list[list[list[float]]]:
        """GeoJSON-style rings with the closing vertex repeated."""
        rings = [self.exterior, *self.holes]
        return [[list(p) for p in r] + [list(r[0])] for r in rings]


# kept for annotations that want to be explicit about the validated state
ValidatedPolygon = Polygon


def validate(exterior: Iterable[Sequence[float]], holes: Iterable[Iterable[Sequence[float]]] = ()) -> Polygon:
    """Check and normalize a polygon.

    Raises DegenerateGeometry for rings with fewer than three distinct
    vertices or zero area and SelfIntersection for non-simple rings.
    Self-intersecting input is rejected, never repaired.
    """
    ext = _validate_ring(exterior, ccw=True, what="exterior")
    hole_rings = tuple(_validate_ring(h, ccw=False, what=f"hole {i}") for i, h in enumerate(holes))
    shape = _ShapelyPolygon(ext, hole_rings)
    if hole_rings and not shape.is_valid:
        raise GeometryError(f"holes must lie inside the exterior without overlap: {shapely.is_valid_reason(shape)}")
    a = _signed_area(ext) + sum(_signed_area(h) for h in hole_rings)
    if a <= 0:
        raise DegenerateGeometry("holes cover the whole exterior")
    return Polygon(exterior=ext, holes=hole_rings, area=a, bounds=tuple(shape.bounds), shape=shape)


def rectangle(x0: float, y0: float, x1: float, y1: float) -> Polygon:
    return validate([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])


def from_shapely(geom) -> Polygon:
    if geom.geom_type != "Polygon":
        raise GeometryError(f"expected a single Polygon, got {geom.geom_type}")
    return validate(list(geom.exterior.coords), [list(r.coords) for r in geom.interiors])


def area(p: Polygon) -> float:
    """Exterior area minus hole areas, in px²."""
    return p.area


def _canonical_key(p: Polygon):
    return (p.area, p.bounds, p.exterior, p.holes)


def intersection_area(a: Polygon, b: Polygon) -> float:
    if not _bbox_overlap(a.bounds, b.bounds):
        return 0.0
    # GEOS results depend on operand order in the last bits; fix the order
    if _canonical_key(b) < _canonical_key(a):
        a, b = b, a
    inter = float(shapely.area(shapely.intersection(a.shape, b.shape)))
    return min(inter, a.area, b.area)


def iou(a: Polygon, b: Polygon) -> float:
    inter = intersection_area(a, b)
    if inter <= 0.0:
        return 0.0
    return _iou_from_areas(inter, a.area, b.area)


def _iou_from_areas(inter, area_a, area_b):
    union = area_a + area_b - inter
    return min(1.0, inter / union)


def _bbox_overlap(ba, bb) -> bool:
    return ba[0] < bb[2] and bb[0] < ba[2] and ba[1] < bb[3] and bb[1] < ba[3]


def pairwise_iou(a: Sequence[Polygon], b: Sequence[Polygon], pairs: np.ndarray) -> np.ndarray:
    """IOU for each (i, j) row of ``pairs``, vectorized through shapely."""
    if len(pairs) == 0:
        return np.zeros(0)
    ga = np.array([p.shape for p in a], dtype=object)[pairs[:, 0]]
    gb = np.array([p.shape for p in b], dtype=object)[pairs[:, 1]]
    swap = np.array([_canonical_key(b[j]) < _canonical_key(a[i]) for i, j in pairs], dtype=bool)
    ga, gb = np.where(swap, gb, ga), np.where(swap, ga, gb)
    area_a = np.array([p.area for p in a])[pairs[:, 0]]
    area_b = np.array([p.area for p in b])[pairs[:, 1]]
    inter = shapely.area(shapely.intersection(ga, gb))
    inter = np.minimum(inter, np.minimum(area_a, area_b))
    union = area_a + area_b - inter
    return np.minimum(1.0, np.where(inter > 0, inter / union, 0.0))
