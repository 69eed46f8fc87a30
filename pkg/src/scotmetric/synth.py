"""Synthetic growth scenarios and noisy proposal series.

Randomness comes from numpy's PCG64 bit generator seeded with the spec's
seed, so a (spec, seed) pair always yields the same series.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import GeometryError, InfeasiblePacking
from .geometry import Polygon, rectangle, validate
from .series import Footprint, Frame, TimeSeries, month_labels


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _check_rate(name: str, v: float) -> None:
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {v}")


@dataclass(frozen=True)
class ScenarioSpec:
    n_initial_buildings: int = 20
    n_frames: int = 6
    construction_rate: float = 0.5  # expected new buildings per frame (Poisson)
    occlusion_rate: float = 0.0
    grid_extent: int = 1024
    min_separation: int = 2
    seed: int = 0
    min_size: int = 4
    max_size: int = 10
    aoi_id: str = "synthetic"

    def __post_init__(self):
        if self.n_frames < 2:
            raise ValueError("n_frames must be >= 2")
        if self.n_initial_buildings < 0:
            raise ValueError("n_initial_buildings must be >= 0")
        _check_rate("construction_rate", self.construction_rate)
        _check_rate("occlusion_rate", self.occlusion_rate)
        if not 1 <= self.min_size <= self.max_size:
            raise ValueError("need 1 <= min_size <= max_size")


@dataclass(frozen=True)
class PerturbationSpec:
    jitter_px: float = 0.0
    drop_rate: float = 0.0
    spurious_rate: float = 0.0  # expected false footprints per frame (Poisson)
    id_swap_rate: float = 0.0
    delay_frames: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.jitter_px < 0:
            raise ValueError("jitter_px must be non-negative")
        for name in ("drop_rate", "spurious_rate", "id_swap_rate"):
            _check_rate(name, getattr(self, name))
        if self.delay_frames < 0:
            raise ValueError("delay_frames must be non-negative")


def gen_scenario(spec: ScenarioSpec) -> TimeSeries:
    """Ground-truth series of non-overlapping axis-aligned rectangles.

    Buildings sit in distinct cells of a jittered grid, which guarantees
    ``min_separation`` between any two of them. Once built they persist,
    apart from frames where they are occluded. ``meta`` records each id's
    first visible label, the occlusions and the construction frames.
    """
    rng = _rng(spec.seed)
    cell = spec.max_size + spec.min_separation
    ncells_x = spec.grid_extent // cell
    capacity = ncells_x * ncells_x
    if spec.n_initial_buildings > capacity:
        raise InfeasiblePacking(
            f"{spec.n_initial_buildings} buildings do not fit in {capacity} cells of {cell} px"
        )
    order = rng.permutation(capacity)
    next_cell = 0

    def place() -> Polygon:
        nonlocal next_cell
        k = int(order[next_cell])
        next_cell += 1
        cx, cy = (k % ncells_x) * cell, (k // ncells_x) * cell
        w, h = (int(v) for v in rng.integers(spec.min_size, spec.max_size + 1, size=2))
        ox = int(rng.integers(0, spec.max_size - w + 1))
        oy = int(rng.integers(0, spec.max_size - h + 1))
        return rectangle(cx + ox, cy + oy, cx + ox + w, cy + oy + h)

    labels = month_labels(spec.n_frames)
    buildings: list[tuple[str, Polygon]] = []
    built_at: dict[str, str] = {}
    for _ in range(spec.n_initial_buildings):
        bid = f"g{len(buildings)}"
        buildings.append((bid, place()))
        built_at[bid] = labels[0]

    frames = []
    first_seen: dict[str, str] = {}
    occlusions: list[tuple[str, str]] = []
    for t, label in enumerate(labels):
        if t > 0:
            n_new = int(rng.poisson(spec.construction_rate))
            for _ in range(min(n_new, capacity - next_cell)):
                bid = f"g{len(buildings)}"
                buildings.append((bid, place()))
                built_at[bid] = label
        fps = []
        for bid, poly in buildings:
            if spec.occlusion_rate > 0 and rng.random() < spec.occlusion_rate:
                occlusions.append((label, bid))
                continue
            first_seen.setdefault(bid, label)
            fps.append(Footprint(bid, poly))
        frames.append(Frame(label, fps))

    meta = {
        "first_appearance": first_seen,
        "constructed": built_at,
        "occlusions": occlusions,
        "scenario": asdict(spec),
    }
    return TimeSeries(spec.aoi_id, tuple(frames), meta)


def _jitter(poly: Polygon, rng: np.random.Generator, scale: float) -> Polygon:
    d = rng.uniform(-scale, scale, size=(len(poly.exterior), 2))
    try:
        return validate([(x + dx, y + dy) for (x, y), (dx, dy) in zip(poly.exterior, d)])
    except GeometryError:
        return poly.translated(float(d[0, 0]), float(d[0, 1]))


def perturb(gt: TimeSeries, spec: PerturbationSpec) -> TimeSeries:
    """Proposal series derived from ``gt`` under the noise model.

    Proposal ids are fresh tokens bijective with gt ids. An id swap gives a
    previously emitted building a new proposal id from that frame onward;
    each one is logged in ``meta["swaps"]`` as ``(label, gt_id, old, new)``.
    """
    rng = _rng(spec.seed)
    first_idx: dict[str, int] = {}
    for t, f in enumerate(gt.frames):
        for i in f.ids:
            first_idx.setdefault(i, t)

    all_bounds = [fp.geometry.bounds for f in gt.frames for fp in f.footprints]
    if all_bounds:
        b = np.array(all_bounds)
        extent = (b[:, 0].min(), b[:, 1].min(), b[:, 2].max(), b[:, 3].max())
    else:
        extent = (0.0, 0.0, 64.0, 64.0)

    counter = 0

    def fresh() -> str:
        nonlocal counter
        counter += 1
        return f"p{counter - 1}"

    current: dict[str, str] = {}
    swaps: list[tuple[str, str, str, str]] = []
    frames = []
    for t, f in enumerate(gt.frames):
        fps = []
        for fp in f.footprints:
            if t < first_idx[fp.id] + spec.delay_frames:
                continue
            if spec.drop_rate > 0 and rng.random() < spec.drop_rate:
                continue
            if fp.id not in current:
                current[fp.id] = fresh()
            elif spec.id_swap_rate > 0 and rng.random() < spec.id_swap_rate:
                old, new = current[fp.id], fresh()
                current[fp.id] = new
                swaps.append((f.label, fp.id, old, new))
            geom = _jitter(fp.geometry, rng, spec.jitter_px) if spec.jitter_px > 0 else fp.geometry
            fps.append(Footprint(current[fp.id], geom))
        n_spurious = int(rng.poisson(spec.spurious_rate)) if spec.spurious_rate > 0 else 0
        for _ in range(n_spurious):
            w, h = rng.uniform(3.0, 10.0, size=2)
            x = rng.uniform(extent[0], max(extent[0], extent[2] - w))
            y = rng.uniform(extent[1], max(extent[1], extent[3] - h))
            fps.append(Footprint(fresh(), rectangle(x, y, x + w, y + h)))
        frames.append(Frame(f.label, fps))
    meta = {"swaps": swaps, "id_map": dict(current), "perturbation": asdict(spec)}
    return TimeSeries(gt.aoi_id, tuple(frames), meta)


def static_proposals(gt: TimeSeries) -> TimeSeries:
    """The first gt frame repeated at every label, with fixed ids."""
    first = gt.frames[0]
    fps = [Footprint(f"s{k}", fp.geometry) for k, fp in enumerate(first.footprints)]
    return TimeSeries(gt.aoi_id, tuple(Frame(f.label, fps) for f in gt.frames))


def figure6_scenario() -> tuple[TimeSeries, TimeSeries]:
    """Four buildings in a row over five months.

    ``a`` and ``b`` exist from the start; ``c`` is built in month 2 and
    ``d`` in month 4. ``a`` is clouded out in month 3 and ``c`` in month 4.
    Proposals track everything with a one-pixel offset, except that
    ``b`` gets a fresh proposal id in month 3, ``d`` is detected one month
    late, and month 5 has one spurious footprint.
    """
    labels = month_labels(5, 2020, 1)
    geom = {k: rectangle(10 + 20 * i, 10, 20 + 20 * i, 20) for i, k in enumerate("abcd")}
    present = {
        "a": {0, 1, 3, 4},
        "b": {0, 1, 2, 3, 4},
        "c": {1, 2, 4},
        "d": {3, 4},
    }
    gt_frames = []
    prop_frames = []
    for t, label in enumerate(labels):
        gfps = [Footprint(k, geom[k]) for k in "abcd" if t in present[k]]
        gt_frames.append(Frame(label, gfps))
        pid = {"a": "1", "b": "2" if t < 2 else "5", "c": "3", "d": "4"}
        pfps = [
            Footprint(pid[k], geom[k].translated(1.0, 0.0))
            for k in "abcd"
            if t in present[k] and not (k == "d" and t == 3)
        ]
        if t == 4:
            pfps.append(Footprint("6", rectangle(200, 200, 210, 210)))
        prop_frames.append(Frame(label, pfps))
    gt = TimeSeries("figure6", tuple(gt_frames), {"occlusions": [(labels[2], "a"), (labels[3], "c")]})
    props = TimeSeries("figure6", tuple(prop_frames), {"swaps": [(labels[2], "b", "2", "5")]})
    return gt, props
