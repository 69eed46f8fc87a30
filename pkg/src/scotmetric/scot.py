"""SCOT scoring: temporal bookkeeping over per-frame matches.

Per AOI the tracking term penalizes identifier inconsistencies across
frames, the change term scores only footprints whose identifier shows up
for the first time, and the two are merged by a beta-weighted harmonic
mean. Dataset scores are plain means over AOIs.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

from .errors import EmptyDataset, MisalignedSeries, ZeroGroundTruth
from .matching import DEFAULT_IOU_THRESHOLD, MatchResult, match_frame
from .series import Frame, TimeSeries

SCORE_NAMES = ("f1", "f_track", "f_change", "f_scot", "mota")


@dataclass(frozen=True)
class ScotConfig:
    beta: float = 2.0
    iou_threshold: float = DEFAULT_IOU_THRESHOLD
    min_area: float = 4.0

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if not 0.0 < self.iou_threshold < 1.0:
            raise ValueError("iou_threshold must lie in (0, 1)")
        if self.min_area < 0:
            raise ValueError("min_area must be non-negative")


@dataclass(frozen=True)
class MatchCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    mm: int = 0
    tp_new: int = 0
    fp_new: int = 0
    fn_new: int = 0

    def __add__(self, other: "MatchCounts") -> "MatchCounts":
        return MatchCounts(**{k: v + getattr(other, k) for k, v in asdict(self).items()})

    @property
    def total_gt(self) -> int:
        return self.tp + self.fn


def align_frames(gt: TimeSeries, prop: TimeSeries) -> list[tuple[Frame, Frame]]:
    """Pair frames by label; missing proposal frames become empty frames."""
    gt_labels = set(gt.labels)
    extra = [lab for lab in prop.labels if lab not in gt_labels]
    if extra:
        raise MisalignedSeries(f"AOI {prop.aoi_id}: proposal frames {extra} have no ground-truth counterpart")
    return [(g, prop.frame(g.label) or Frame(g.label)) for g in gt.frames]


def track_bookkeeping(
    gt: TimeSeries, prop: TimeSeries, cfg: ScotConfig = ScotConfig()
) -> tuple[list[MatchResult], MatchCounts]:
    """Match every aligned frame and count tp/fp/fn/mm.

    A match is a mismatch when the gt id was most recently matched to a
    different proposal id, or the proposal id to a different gt id. The
    last-partner maps are updated after every match, mismatches included,
    and survive frames in which either id is absent.
    """
    last_prop: dict[str, str] = {}
    last_gt: dict[str, str] = {}
    results = []
    tp = fp = fn = mm = 0
    for gf, pf in align_frames(gt, prop):
        res = match_frame(gf.polygons, pf.polygons, cfg.iou_threshold)
        results.append(res)
        for gi, pj, _ in res.pairs:
            g, p = gf.footprints[gi].id, pf.footprints[pj].id
            if last_prop.get(g, p) != p or last_gt.get(p, g) != g:
                mm += 1
            last_prop[g] = p
            last_gt[p] = g
        tp += len(res.pairs)
        fn += len(res.unmatched_gt)
        fp += len(res.unmatched_prop)
    return results, MatchCounts(tp=tp, fp=fp, fn=fn, mm=mm)


def _new_ids_by_frame(series: TimeSeries) -> dict[str, set[str]]:
    """Ids making their first appearance at each label; the earliest frame never has new ids."""
    seen: set[str] = set()
    out: dict[str, set[str]] = {}
    for k, frame in enumerate(series.frames):
        fresh = {i for i in frame.ids if i not in seen}
        seen |= fresh
        out[frame.label] = fresh if k > 0 else set()
    return out


def change_bookkeeping(
    gt: TimeSeries, prop: TimeSeries, cfg: ScotConfig, results: Sequence[MatchResult]
) -> MatchCounts:
    """Count tp_new/fp_new/fn_new after dropping every non-new footprint.

    When a new footprint is matched to a non-new one, the non-new partner
    is dropped and the new one is left unmatched.
    """
    gt_new = _new_ids_by_frame(gt)
    prop_new = _new_ids_by_frame(prop)
    tp_new = fp_new = fn_new = 0
    for (gf, pf), res in zip(align_frames(gt, prop), results):
        gn = gt_new[gf.label]
        pn = prop_new.get(pf.label, set())
        for gi, pj, _ in res.pairs:
            g_is_new = gf.footprints[gi].id in gn
            p_is_new = pf.footprints[pj].id in pn
            if g_is_new and p_is_new:
                tp_new += 1
            elif g_is_new:
                fn_new += 1
            elif p_is_new:
                fp_new += 1
        fn_new += sum(1 for gi in res.unmatched_gt if gf.footprints[gi].id in gn)
        fp_new += sum(1 for pj in res.unmatched_prop if pf.footprints[pj].id in pn)
    return MatchCounts(tp_new=tp_new, fp_new=fp_new, fn_new=fn_new)


def _f_score(good: int, tp: int, fp: int, fn: int) -> float:
    denom = tp + 0.5 * (fp + fn)
    if denom == 0:
        return 1.0
    return good / denom


def legacy_f1(c: MatchCounts) -> float:
    return _f_score(c.tp, c.tp, c.fp, c.fn)


def f_track(c: MatchCounts) -> float:
    return _f_score(c.tp - c.mm, c.tp, c.fp, c.fn)


def f_change(c: MatchCounts) -> float:
    return _f_score(c.tp_new, c.tp_new, c.fp_new, c.fn_new)


def combine(track: float, change: float, beta: float = 2.0) -> float:
    """Weighted harmonic mean; beta > 1 weights the tracking term more."""
    b2 = beta * beta
    denom = b2 * change + track
    if denom == 0:
        return 0.0
    return (1 + b2) * change * track / denom


def mota(c: MatchCounts, total_gt: int | None = None) -> float:
    total = c.total_gt if total_gt is None else total_gt
    if total <= 0:
        raise ZeroGroundTruth("MOTA is undefined without ground-truth footprints")
    return 1.0 - (c.fn + c.fp + c.mm) / total


@dataclass(frozen=True)
class AoiScore:
    aoi_id: str
    counts: MatchCounts
    f1: float
    f_track: float
    f_change: float
    f_scot: float
    mota: float | None

    def score(self, name: str) -> float | None:
        return getattr(self, name)


def score_aoi(gt: TimeSeries, prop: TimeSeries, cfg: ScotConfig = ScotConfig()) -> AoiScore:
    results, counts = track_bookkeeping(gt, prop, cfg)
    counts = counts + change_bookkeeping(gt, prop, cfg, results)
    ft = f_track(counts)
    fc = f_change(counts)
    return AoiScore(
        aoi_id=gt.aoi_id,
        counts=counts,
        f1=legacy_f1(counts),
        f_track=ft,
        f_change=fc,
        f_scot=combine(ft, fc, cfg.beta),
        mota=mota(counts) if counts.total_gt > 0 else None,
    )


@dataclass(frozen=True)
class Summary:
    mean: float | None
    std: float | None


@dataclass(frozen=True)
class ScoreReport:
    config: ScotConfig
    per_aoi: dict[str, AoiScore]
    dataset: dict[str, Summary] = field(default_factory=dict)


def _summarize(values: list[float]) -> Summary:
    if not values:
        return Summary(None, None)
    n = len(values)
    mean = math.fsum(values) / n
    std = math.sqrt(math.fsum((v - mean) ** 2 for v in values) / n)
    return Summary(mean, std)


def summarize(per_aoi: dict[str, AoiScore]) -> dict[str, Summary]:
    """Unweighted mean and population standard deviation of each score."""
    out = {}
    for name in SCORE_NAMES:
        vals = [s.score(name) for s in per_aoi.values()]
        out[name] = _summarize([v for v in vals if v is not None])
    return out


def score_dataset(pairs: Sequence[tuple[TimeSeries, TimeSeries]], cfg: ScotConfig = ScotConfig()) -> ScoreReport:
    if not pairs:
        raise EmptyDataset("no AOIs to score")
    per_aoi: dict[str, AoiScore] = {}
    for gt, prop in pairs:
        if gt.aoi_id in per_aoi:
            raise ValueError(f"AOI {gt.aoi_id!r} given twice")
        per_aoi[gt.aoi_id] = score_aoi(gt, prop, cfg)
    return ScoreReport(config=cfg, per_aoi=per_aoi, dataset=summarize(per_aoi))
