"""Scoring filters: minimum area and unusable-data-mask exclusion."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import shapely

from .series import Frame, TimeSeries

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FilterPolicy:
    min_area: float = 4.0
    # drop a footprint when more than this fraction of it is under the UDM
    udm_overlap_fraction: float = 0.5

    def __post_init__(self):
        if self.min_area < 0:
            raise ValueError("min_area must be non-negative")
        if not 0.0 <= self.udm_overlap_fraction <= 1.0:
            raise ValueError("udm_overlap_fraction must lie in [0, 1]")


def _filter_frame(frame: Frame, udm: tuple, policy: FilterPolicy) -> Frame:
    kept = [f for f in frame.footprints if f.geometry.area >= policy.min_area]
    if udm and kept:
        mask = shapely.union_all([u.shape for u in udm])
        covered = shapely.area(shapely.intersection([f.geometry.shape for f in kept], mask))
        kept = [f for f, c in zip(kept, covered) if not c > policy.udm_overlap_fraction * f.geometry.area]
    return frame.with_footprints(kept)


def apply_filters(series: TimeSeries, policy: FilterPolicy = FilterPolicy(), udm_source: TimeSeries | None = None) -> TimeSeries:
    """Drop small footprints and footprints mostly hidden by the UDM.

    The UDM always comes from ``udm_source`` (the ground truth) when given;
    otherwise from the series itself. Frames keep their UDM polygons, so
    the operation is idempotent.
    """
    frames = []
    for f in series.frames:
        if udm_source is not None:
            src = udm_source.frame(f.label)
            udm = src.udm if src is not None else ()
            if f.udm and udm_source is not series:
                log.warning("AOI %s frame %s: ignoring proposal-side UDM", series.aoi_id, f.label)
        else:
            udm = f.udm
        frames.append(_filter_frame(f, udm, policy))
    return TimeSeries(series.aoi_id, tuple(frames), dict(series.meta))
