"""Footprints, frames and time series."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable

from .errors import DuplicateId, DuplicateLabel
from .geometry import Polygon


@dataclass(frozen=True)
class Footprint:
    id: str
    geometry: Polygon


@dataclass(frozen=True)
class Frame:
    """All footprints of one AOI at one timestep, plus unusable-data polygons.

    Labels sort chronologically; the canonical form is ``YYYY_MM``.
    """

    label: str
    footprints: tuple[Footprint, ...] = ()
    udm: tuple[Polygon, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "footprints", tuple(self.footprints))
        object.__setattr__(self, "udm", tuple(self.udm))
        seen: set[str] = set()
        for fp in self.footprints:
            if fp.id in seen:
                raise DuplicateId(f"frame {self.label}: id {fp.id!r} appears more than once")
            seen.add(fp.id)

    @property
    def ids(self) -> list[str]:
        return [f.id for f in self.footprints]

    @property
    def polygons(self) -> list[Polygon]:
        return [f.geometry for f in self.footprints]

    def with_footprints(self, footprints: Iterable[Footprint]) -> "Frame":
        return replace(self, footprints=tuple(footprints))


@dataclass(frozen=True)
class TimeSeries:
    aoi_id: str
    frames: tuple[Frame, ...]
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        frames = tuple(sorted(self.frames, key=lambda f: f.label))
        labels = [f.label for f in frames]
        if len(set(labels)) != len(labels):
            raise DuplicateLabel(f"AOI {self.aoi_id}: repeated frame labels")
        object.__setattr__(self, "frames", frames)

    @property
    def labels(self) -> list[str]:
        return [f.label for f in self.frames]

    def frame(self, label: str) -> Frame | None:
        for f in self.frames:
            if f.label == label:
                return f
        return None

    def n_footprints(self) -> int:
        return sum(len(f.footprints) for f in self.frames)

    def relabeled(self, mapping) -> "TimeSeries":
        """Apply an id mapping (callable or dict) uniformly across all frames."""
        fn = mapping if callable(mapping) else mapping.__getitem__
        frames = tuple(
            f.with_footprints(Footprint(fn(fp.id), fp.geometry) for fp in f.footprints) for f in self.frames
        )
        return replace(self, frames=frames)


def month_labels(n: int, start_year: int = 2018, start_month: int = 1) -> list[str]:
    out = []
    y, m = start_year, start_month
    for _ in range(n):
        out.append(f"{y:04d}_{m:02d}")
        m += 1
        if m > 12:
            y, m = y + 1, 1
    return out
