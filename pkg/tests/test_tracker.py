import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import ndimage

from scotmetric.geometry import rectangle
from scotmetric.tracker import BinaryMask, polygonize_mask, propagate_ids, rasterize


def has_diagonal_only(m):
    a, b, c, d = m[:-1, :-1], m[:-1, 1:], m[1:, :-1], m[1:, 1:]
    return bool(np.any(a & d & ~b & ~c) or np.any(b & c & ~a & ~d))


def test_empty_mask():
    assert polygonize_mask(np.zeros((16, 16), dtype=np.uint8)) == []


def test_single_block():
    m = np.zeros((8, 8), dtype=np.uint8)
    m[0:3, 0:3] = 255
    (p,) = polygonize_mask(m, min_area=0)
    assert p.area == 9.0
    assert p.bounds == (0.0, 0.0, 3.0, 3.0)
    assert len(p.exterior) == 4


def test_two_blocks():
    m = np.zeros((8, 8), dtype=bool)
    m[1:3, 1:3] = True
    m[1:3, 4:6] = True
    polys = polygonize_mask(m, min_area=4)
    assert [p.area for p in polys] == [4.0, 4.0]


def test_small_components_dropped():
    m = np.zeros((6, 6), dtype=bool)
    m[0, 0] = True
    m[3:5, 3:5] = True
    assert [p.area for p in polygonize_mask(m, min_area=4)] == [4.0]


def test_holes_filled():
    m = np.ones((5, 5), dtype=bool)
    m[2, 2] = False
    (p,) = polygonize_mask(m, min_area=0)
    assert p.area == 25.0 and p.holes == ()


def test_diagonal_pixels_form_one_polygon():
    m = np.array([[1, 0], [0, 1]], dtype=bool)
    (p,) = polygonize_mask(m, min_area=0)
    assert p.area == 2.5


def test_binary_mask_wrapper():
    arr = np.zeros((4, 6), dtype=np.uint8)
    arr[1:3, 2:5] = 1
    bm = BinaryMask.from_array(arr)
    assert (bm.width, bm.height) == (6, 4)
    assert polygonize_mask(bm, 0)[0].area == 6.0
    with pytest.raises(ValueError):
        BinaryMask(2, 2, b"\x00")


masks = st.integers(0, 2**32 - 1).map(
    lambda s: np.random.default_rng(s).random((24, 24)) < np.random.default_rng(s + 1).uniform(0.2, 0.7)
)


@settings(max_examples=150, deadline=None)
@given(masks)
def test_every_component_polygonizes_validly(m):
    labels, n = ndimage.label(m, structure=np.ones((3, 3)))
    polys = polygonize_mask(m, min_area=0)
    assert len(polys) == n
    for p in polys:
        assert p.area > 0


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_round_trip_without_diagonal_junctions(seed):
    rng = np.random.default_rng(seed)
    m = ndimage.binary_opening(rng.random((32, 32)) < 0.55)
    m = ndimage.binary_closing(m) & m
    if has_diagonal_only(m):
        # resolve each corner-only contact by filling one background pixel
        while has_diagonal_only(m):
            a, b, c, d = m[:-1, :-1], m[:-1, 1:], m[1:, :-1], m[1:, 1:]
            r, col = np.argwhere((a & d & ~b & ~c) | (b & c & ~a & ~d))[0]
            m[r, col + 1 if m[r, col] else col] = True
    polys = polygonize_mask(m, min_area=0)
    back = rasterize(polys, *m.shape)
    assert np.array_equal(back, ndimage.binary_fill_holes(m))


def test_propagate_single_frame():
    frame = [rectangle(10 * i, 0, 10 * i + 5, 5) for i in range(4)]
    s = propagate_ids([frame])
    assert s.frames[0].ids == ["0", "1", "2", "3"]


def test_propagate_identical_frames():
    frame = [rectangle(10 * i, 0, 10 * i + 5, 5) for i in range(4)]
    s = propagate_ids([frame, list(reversed(frame))])
    assert s.frames[1].ids == ["3", "2", "1", "0"]


def test_propagate_new_building_gets_next_id():
    frame = [rectangle(10 * i, 0, 10 * i + 5, 5) for i in range(3)]
    s = propagate_ids([frame, frame + [rectangle(100, 100, 105, 105)]])
    assert s.frames[1].ids == ["0", "1", "2", "3"]


def test_occluded_building_loses_id_by_default():
    a, b = rectangle(0, 0, 5, 5), rectangle(10, 0, 15, 5)
    s = propagate_ids([[a, b], [b], [a, b]])
    assert s.frames[2].ids == ["2", "1"]
    s2 = propagate_ids([[a, b], [b], [a, b]], max_gap=2)
    assert s2.frames[2].ids == ["0", "1"]


def test_ids_never_reappear_after_absence():
    rng = np.random.default_rng(0)
    frames = []
    for _ in range(8):
        frames.append([rectangle(x, y, x + 4, y + 4) for x, y in rng.integers(0, 60, size=(15, 2)) if rng.random() < 0.8])
    s = propagate_ids(frames)
    prev: set[str] = set()
    seen: set[str] = set()
    for f in s.frames:
        ids = set(f.ids)
        assert len(ids) == len(f.ids)
        assert not ((ids & seen) - prev)
        seen |= ids
        prev = ids
