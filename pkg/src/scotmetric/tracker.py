"""Baseline tracker: mask polygonization and identifier propagation.

Each frame is matched against the frame before it; matched footprints
inherit the predecessor's id and everything else gets a fresh id from a
per-series counter.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import shapely
from scipy import ndimage
from shapely.geometry import Polygon as _ShapelyPolygon
from shapely.geometry import box

from .geometry import Polygon, validate
from .matching import DEFAULT_IOU_THRESHOLD, match_frame
from .series import Footprint, Frame, TimeSeries, month_labels

_EIGHT = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class BinaryMask:
    width: int
    height: int
    data: bytes  # row-major, one byte per pixel, nonzero = foreground

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("mask dimensions must be positive")
        if len(self.data) != self.width * self.height:
            raise ValueError(f"mask data has {len(self.data)} bytes, expected {self.width * self.height}")

    @classmethod
    def from_array(cls, arr) -> "BinaryMask":
        a = np.asarray(arr)
        if a.ndim != 2:
            raise ValueError("mask must be two-dimensional")
        return cls(width=a.shape[1], height=a.shape[0], data=(a != 0).astype(np.uint8).tobytes())

    def to_array(self) -> np.ndarray:
        return np.frombuffer(self.data, dtype=np.uint8).reshape(self.height, self.width) != 0


def _bridges(filled: np.ndarray) -> list[_ShapelyPolygon]:
    """Half-pixel triangles joining pixels that touch only at a corner."""
    out = []
    a = filled[:-1, :-1]
    b = filled[:-1, 1:]
    c = filled[1:, :-1]
    d = filled[1:, 1:]
    # [[1,0],[0,1]]: fill the lower-left half of the top-right pixel
    for r, col in zip(*np.nonzero(a & d & ~b & ~c)):
        x, y = col + 1, r + 1
        out.append(_ShapelyPolygon([(x, y - 1), (x + 1, y), (x, y)]))
    # [[0,1],[1,0]]: fill the lower-right half of the top-left pixel
    for r, col in zip(*np.nonzero(b & c & ~a & ~d)):
        x, y = col + 1, r + 1
        out.append(_ShapelyPolygon([(x, y - 1), (x, y), (x - 1, y)]))
    return out


def _component_polygon(filled: np.ndarray, x0: int, y0: int) -> Polygon:
    pieces = []
    for r in range(filled.shape[0]):
        row = filled[r]
        edges = np.flatnonzero(np.diff(np.concatenate(([0], row.astype(np.int8), [0]))))
        for start, stop in zip(edges[::2], edges[1::2]):
            pieces.append(box(start, r, stop, r + 1))
    pieces.extend(_bridges(filled))
    merged = shapely.union_all(pieces)
    if merged.geom_type != "Polygon":
        raise RuntimeError("connected component did not polygonize to a single ring")
    outline = shapely.simplify(_ShapelyPolygon(merged.exterior), 0.0)
    return validate([(x + x0, y + y0) for x, y in outline.exterior.coords])


def polygonize_mask(mask, min_area: float = 4.0) -> list[Polygon]:
    """One polygon per 8-connected foreground component, traced on pixel edges.

    Interior holes are filled. Pixels that touch only diagonally are
    joined by a half-pixel bridge so every outline is a simple ring.
    Components smaller than ``min_area`` px² are dropped.
    """
    arr = mask.to_array() if isinstance(mask, BinaryMask) else np.asarray(mask) != 0
    labels, n = ndimage.label(arr, structure=_EIGHT)
    polys = []
    for k, sl in enumerate(ndimage.find_objects(labels), start=1):
        if sl is None:
            continue
        comp = labels[sl] == k
        filled = ndimage.binary_fill_holes(comp)
        poly = _component_polygon(filled, sl[1].start, sl[0].start)
        if poly.area >= min_area:
            polys.append(poly)
    return polys


def rasterize(polys: Sequence[Polygon], height: int, width: int) -> np.ndarray:
    """Foreground wherever a pixel center lies inside some polygon."""
    out = np.zeros((height, width), dtype=bool)
    if not polys:
        return out
    union = shapely.union_all([p.shape for p in polys])
    yy, xx = np.mgrid[0:height, 0:width]
    out[:] = shapely.contains_xy(union, xx + 0.5, yy + 0.5)
    return out


def propagate_ids(
    frames: Sequence[Sequence[Polygon]],
    threshold: float = DEFAULT_IOU_THRESHOLD,
    labels: Sequence[str] | None = None,
    aoi_id: str = "tracked",
    max_gap: int = 1,
) -> TimeSeries:
    """Assign persistent ids by matching each frame against its predecessor.

    ``max_gap`` > 1 also lets a footprint pick up an id last seen up to
    that many frames back; the published baseline uses 1.
    """
    if max_gap < 1:
        raise ValueError("max_gap must be >= 1")
    labels = list(labels) if labels is not None else month_labels(len(frames))
    if len(labels) != len(frames):
        raise ValueError("one label per frame required")

    counter = 0
    history: list[list[Footprint]] = []
    out_frames = []
    for t, polys in enumerate(frames):
        pool: list[Footprint] = []
        taken: set[str] = set()
        for past in reversed(history[max(0, t - max_gap):t]):
            for fp in past:
                if fp.id not in taken:
                    taken.add(fp.id)
                    pool.append(fp)
        res = match_frame([fp.geometry for fp in pool], list(polys), threshold)
        ids: list[str | None] = [None] * len(polys)
        for pi, ci, _ in res.pairs:
            ids[ci] = pool[pi].id
        for ci in range(len(polys)):
            if ids[ci] is None:
                ids[ci] = str(counter)
                counter += 1
        current = [Footprint(i, p) for i, p in zip(ids, polys)]
        history.append(current)
        out_frames.append(Frame(labels[t], current))
    return TimeSeries(aoi_id, tuple(out_frames))
