"""Scoring for identifier-tagged building-footprint time series (SCOT)."""
from .filters import FilterPolicy, apply_filters
from .geometry import Polygon, area, iou, rectangle, validate
from .matching import MatchResult, candidate_pairs, match_frame
from .oracle import brute_force_match
from .scot import (
    AoiScore,
    MatchCounts,
    ScoreReport,
    ScotConfig,
    change_bookkeeping,
    combine,
    f_change,
    f_track,
    legacy_f1,
    mota,
    score_aoi,
    score_dataset,
    track_bookkeeping,
)
from .series import Footprint, Frame, TimeSeries
from .synth import PerturbationSpec, ScenarioSpec, gen_scenario, perturb
from .tracker import BinaryMask, polygonize_mask, propagate_ids

__version__ = "0.1.0"
