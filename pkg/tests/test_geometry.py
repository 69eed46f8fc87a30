import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scotmetric.errors import DegenerateGeometry, GeometryError, SelfIntersection
from scotmetric.geometry import area, intersection_area, iou, rectangle, validate

from conftest import star_polygon

UNIT = [(0, 0), (1, 0), (1, 1), (0, 1)]


def segments_cross(ring):
    """Independent check: does any pair of non-adjacent edges intersect?"""

    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    n = len(ring)
    edges = [(ring[i], ring[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            (p1, p2), (q1, q2) = edges[i], edges[j]
            d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
            d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
            if d1 * d2 < 0 and d3 * d4 < 0:
                return True
    return False


def rect_iou(a, b):
    """Closed-form IOU of axis-aligned boxes (x0, y0, x1, y1)."""
    iw = max(0.0, min(a[2], b[2]) - max(a[0], b[0]))
    ih = max(0.0, min(a[3], b[3]) - max(a[1], b[1]))
    inter = iw * ih
    union = (a[2] - a[0]) * (a[3] - a[1]) + (b[2] - b[0]) * (b[3] - b[1]) - inter
    return inter / union


def test_unit_square_valid():
    p = validate(UNIT)
    assert area(p) == 1.0


def test_collinear_is_degenerate():
    with pytest.raises(DegenerateGeometry):
        validate([(0, 0), (1, 1), (2, 2)])


def test_too_few_vertices():
    with pytest.raises(DegenerateGeometry):
        validate([(0, 0), (1, 0), (1e-12, 0)])


def test_bowtie_rejected():
    bowtie = [(0, 0), (2, 2), (2, 0), (0, 2)]
    assert segments_cross(bowtie)
    assert not segments_cross(UNIT)
    with pytest.raises(SelfIntersection):
        validate(bowtie)


def test_orientation_normalized():
    cw = validate(list(reversed(UNIT)), [[(0.25, 0.25), (0.75, 0.25), (0.75, 0.75), (0.25, 0.75)]])
    x = [p[0] for p in cw.exterior]
    y = [p[1] for p in cw.exterior]
    signed = sum(x[i] * y[(i + 1) % 4] - x[(i + 1) % 4] * y[i] for i in range(4)) / 2
    assert signed > 0
    h = cw.holes[0]
    hs = sum(h[i][0] * h[(i + 1) % 4][1] - h[(i + 1) % 4][0] * h[i][1] for i in range(4)) / 2
    assert hs < 0


def test_closing_vertex_and_near_duplicates_merged():
    p = validate([(0, 0), (1, 0), (1, 0 + 1e-12), (1, 1), (0, 1), (0, 0)])
    assert len(p.exterior) == 4


def test_hole_outside_rejected():
    with pytest.raises(GeometryError):
        validate(UNIT, [[(2, 2), (3, 2), (3, 3), (2, 3)]])


@pytest.mark.parametrize(
    "ring,holes,expected",
    [
        (UNIT, [], 1.0),
        ([(0, 0), (2, 0), (0, 2)], [], 2.0),
        (UNIT, [[(0.25, 0.25), (0.75, 0.25), (0.75, 0.75), (0.25, 0.75)]], 0.75),
    ],
)
def test_area_examples(ring, holes, expected):
    assert area(validate(ring, holes)) == pytest.approx(expected, abs=1e-12)


def test_iou_examples():
    a = rectangle(0, 0, 1, 1)
    assert iou(a, a) == 1.0
    assert iou(a, rectangle(5, 5, 6, 6)) == 0.0
    assert iou(a, rectangle(0.5, 0, 1.5, 1)) == pytest.approx(1 / 3, abs=1e-9)


def test_shared_edge_has_zero_intersection():
    a, b = rectangle(0, 0, 1, 1), rectangle(1, 0, 2, 1)
    assert intersection_area(a, b) == 0.0
    assert iou(a, b) == 0.0


coord = st.floats(-50, 50, allow_nan=False)
size = st.floats(0.1, 20, allow_nan=False)


@settings(max_examples=300, deadline=None)
@given(coord, coord, size, size, coord, coord, size, size)
def test_rectangle_iou_closed_form(x0, y0, w0, h0, x1, y1, w1, h1):
    a = (x0, y0, x0 + w0, y0 + h0)
    b = (x1, y1, x1 + w1, y1 + h1)
    assert iou(rectangle(*a), rectangle(*b)) == pytest.approx(rect_iou(a, b), abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_area_translation_rotation_invariant(seed):
    rng = np.random.default_rng(seed)
    p = star_polygon(rng, 0.0, 0.0, 1.0, 30.0, int(rng.integers(3, 12)))
    theta = rng.uniform(0, 2 * math.pi)
    dx, dy = rng.uniform(-1000, 1000, 2)
    c, s = math.cos(theta), math.sin(theta)
    q = validate([(c * x - s * y + dx, s * x + c * y + dy) for x, y in p.exterior])
    assert area(q) == pytest.approx(area(p), abs=1e-9)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_iou_symmetric_and_bounded(seed):
    from conftest import random_shape

    rng = np.random.default_rng(seed)
    a, b = random_shape(rng, 5.0), random_shape(rng, 5.0)
    v = iou(a, b)
    assert v == iou(b, a)
    assert 0.0 <= v <= 1.0
    assert iou(a, a) == pytest.approx(1.0, abs=1e-9)
    assert intersection_area(a, b) <= min(area(a), area(b)) + 1e-9
