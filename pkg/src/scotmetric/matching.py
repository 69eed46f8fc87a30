"""One-to-one matching of ground-truth and proposal footprints in a frame.

The objective is lexicographic: as many matches as possible, then the
largest sum of IOUs. Both levels are folded into one assignment problem
by weighting each eligible pair with ``1 + iou * eps`` where
``eps = 1 / (min(n, m) + 1)``; a single extra match is then worth more than
any achievable IOU sum. Remaining ties (sums within ``TIE_TOL``) go to the
lexicographically smallest sorted list of ``(gt_index, prop_index)`` pairs.

Eligibility is ``iou >= threshold``.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .geometry import Polygon, pairwise_iou

DEFAULT_IOU_THRESHOLD = 0.25
# IOU sums closer than this are treated as equal
TIE_TOL = 1e-9

Pair = tuple[int, int, float]


@dataclass(frozen=True)
class MatchResult:
    pairs: tuple[Pair, ...]
    unmatched_gt: tuple[int, ...]
    unmatched_prop: tuple[int, ...]

    @property
    def cardinality(self) -> int:
        return len(self.pairs)

    @property
    def sum_iou(self) -> float:
        return iou_sum(self.pairs)


def iou_sum(pairs) -> float:
    """Order-independent IOU total (pairs are summed in sorted order)."""
    return math.fsum(p[2] for p in sorted(pairs))


def _grid_cell_size(boxes: np.ndarray) -> float:
    if len(boxes) == 0:
        return 1.0
    extent = np.maximum(boxes[:, 2] - boxes[:, 0], boxes[:, 3] - boxes[:, 1])
    return max(1.0, 2.0 * float(np.median(extent)))


def _bbox_candidates(gt: Sequence[Polygon], props: Sequence[Polygon]) -> np.ndarray:
    """Index pairs whose bounding boxes overlap, found through a uniform grid."""
    if not gt or not props:
        return np.zeros((0, 2), dtype=np.intp)
    pb = np.array([p.bounds for p in props], dtype=float)
    gb = np.array([g.bounds for g in gt], dtype=float)
    cell = _grid_cell_size(pb)

    buckets: dict[tuple[int, int], list[int]] = defaultdict(list)
    lo = np.floor(pb[:, :2] / cell).astype(np.int64)
    hi = np.floor(pb[:, 2:] / cell).astype(np.int64)
    for j in range(len(props)):
        for cx in range(lo[j, 0], hi[j, 0] + 1):
            for cy in range(lo[j, 1], hi[j, 1] + 1):
                buckets[(cx, cy)].append(j)

    glo = np.floor(gb[:, :2] / cell).astype(np.int64)
    ghi = np.floor(gb[:, 2:] / cell).astype(np.int64)
    out_i: list[int] = []
    out_j: list[int] = []
    for i in range(len(gt)):
        seen: set[int] = set()
        for cx in range(glo[i, 0], ghi[i, 0] + 1):
            for cy in range(glo[i, 1], ghi[i, 1] + 1):
                seen.update(buckets.get((cx, cy), ()))
        if not seen:
            continue
        x0, y0, x1, y1 = gb[i]
        for j in sorted(seen):
            b = pb[j]
            if x0 < b[2] and b[0] < x1 and y0 < b[3] and b[1] < y1:
                out_i.append(i)
                out_j.append(j)
    return np.column_stack([np.array(out_i, dtype=np.intp), np.array(out_j, dtype=np.intp)])


def candidate_pairs(gt: Sequence[Polygon], props: Sequence[Polygon], threshold: float = DEFAULT_IOU_THRESHOLD) -> list[Pair]:
    """All (gt_index, prop_index, iou) with iou >= threshold, sorted by index."""
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    idx = _bbox_candidates(gt, props)
    if len(idx) == 0:
        return []
    ious = pairwise_iou(gt, props, idx)
    keep = ious >= threshold
    return [(int(i), int(j), float(v)) for (i, j), v in zip(idx[keep], ious[keep])]


def _solve(rows: list[int], cols: list[int], w: dict[tuple[int, int], float]) -> list[Pair]:
    """Max-cardinality, then max-IOU-sum matching restricted to rows x cols."""
    if not rows or not cols:
        return []
    eps = 1.0 / (min(len(rows), len(cols)) + 1)
    mat = np.zeros((len(rows), len(cols)))
    any_edge = False
    for a, r in enumerate(rows):
        for b, c in enumerate(cols):
            v = w.get((r, c))
            if v is not None:
                mat[a, b] = 1.0 + v * eps
                any_edge = True
    if not any_edge:
        return []
    ra, cb = linear_sum_assignment(mat, maximize=True)
    return [(rows[a], cols[b], w[(rows[a], cols[b])]) for a, b in zip(ra, cb) if mat[a, b] > 0.0]


def _value(pairs) -> tuple[int, float]:
    return len(pairs), iou_sum(pairs)


def _is_optimal(val: tuple[int, float], best: tuple[int, float]) -> bool:
    return val[0] == best[0] and val[1] >= best[1] - TIE_TOL


def _match_component(rows: list[int], cols: list[int], w: dict[tuple[int, int], float]) -> list[Pair]:
    if len(rows) == 1 or len(cols) == 1:
        # a star: a single pair is matched; take the best, lowest index on ties
        edges = sorted((r, c, w[(r, c)]) for r in rows for c in cols if (r, c) in w)
        top = max(e[2] for e in edges)
        return [next(e for e in edges if e[2] >= top - TIE_TOL)]

    best = _value(_solve(rows, cols, w))
    fixed: list[Pair] = []
    used_cols: set[int] = set()
    for k, r in enumerate(rows):
        later = rows[k + 1:]
        options = sorted(c for c in cols if (r, c) in w and c not in used_cols)
        chosen = None
        for c in options:
            trial = fixed + [(r, c, w[(r, c)])]
            rest = _solve(later, [x for x in cols if x not in used_cols and x != c], w)
            if _is_optimal(_value(trial + rest), best):
                chosen = (r, c, w[(r, c)])
                break
        if chosen is not None:
            fixed.append(chosen)
            used_cols.add(chosen[1])
        # otherwise row r stays unmatched in every optimum
    return fixed


def match_candidates(n_gt: int, n_prop: int, cands: Sequence[Pair]) -> MatchResult:
    """Solve the frame matching given precomputed eligible pairs."""
    pairs: list[Pair] = []
    if cands:
        w = {(i, j): v for i, j, v in cands}
        gi = np.array([c[0] for c in cands])
        pj = np.array([c[1] for c in cands])
        graph = coo_matrix((np.ones(len(cands)), (gi, n_gt + pj)), shape=(n_gt + n_prop, n_gt + n_prop))
        _, labels = connected_components(graph, directed=False)
        members: dict[int, tuple[set[int], set[int]]] = defaultdict(lambda: (set(), set()))
        for i, j, _ in cands:
            rs, cs = members[labels[i]]
            rs.add(i)
            cs.add(j)
        for rs, cs in members.values():
            pairs.extend(_match_component(sorted(rs), sorted(cs), w))
    pairs.sort()
    mg = {p[0] for p in pairs}
    mp = {p[1] for p in pairs}
    return MatchResult(
        pairs=tuple(pairs),
        unmatched_gt=tuple(i for i in range(n_gt) if i not in mg),
        unmatched_prop=tuple(j for j in range(n_prop) if j not in mp),
    )


def match_frame(gt: Sequence[Polygon], props: Sequence[Polygon], threshold: float = DEFAULT_IOU_THRESHOLD) -> MatchResult:
    return match_candidates(len(gt), len(props), candidate_pairs(gt, props, threshold))
