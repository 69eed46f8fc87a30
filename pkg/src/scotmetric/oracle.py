"""Exhaustive matching oracle for small frames.

Shares nothing with the production matcher beyond the single-pair IOU:
every pair is scored directly and every matching is enumerated.
"""
from __future__ import annotations

from typing import Sequence

from .errors import TooLarge
from .geometry import Polygon, iou
from .matching import TIE_TOL, MatchResult, iou_sum

MAX_SIDE = 10


def brute_force_match(gt: Sequence[Polygon], props: Sequence[Polygon], threshold: float) -> MatchResult:
    if min(len(gt), len(props)) > MAX_SIDE:
        raise TooLarge(f"brute force limited to min side <= {MAX_SIDE}")
    edges: list[list[tuple[int, float]]] = []
    for g in gt:
        row = []
        for j, p in enumerate(props):
            v = iou(g, p)
            if v >= threshold:
                row.append((j, v))
        edges.append(row)

    matchings: list[list[tuple[int, int, float]]] = []

    def walk(i: int, used: frozenset, acc: list) -> None:
        if i == len(gt):
            matchings.append(list(acc))
            return
        walk(i + 1, used, acc)
        for j, v in edges[i]:
            if j not in used:
                acc.append((i, j, v))
                walk(i + 1, used | {j}, acc)
                acc.pop()

    walk(0, frozenset(), [])
    kmax = max(len(m) for m in matchings)
    top = [m for m in matchings if len(m) == kmax]
    smax = max(iou_sum(m) for m in top)
    tied = [m for m in top if iou_sum(m) >= smax - TIE_TOL]
    best = min(tied, key=lambda m: [(i, j) for i, j, _ in sorted(m)])
    best = sorted(best)
    mg = {i for i, _, _ in best}
    mp = {j for _, j, _ in best}
    return MatchResult(
        pairs=tuple(best),
        unmatched_gt=tuple(i for i in range(len(gt)) if i not in mg),
        unmatched_prop=tuple(j for j in range(len(props)) if j not in mp),
    )
