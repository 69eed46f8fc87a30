import math

import numpy as np
import pytest

from scotmetric.geometry import rectangle, validate

_CRITERIA: list[tuple[int, str, str, float]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion number and summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _CRITERIA.append((mark.args[0], mark.args[1], rep.outcome.upper(), rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n, text, outcome, dur in sorted(_CRITERIA):
        verdict = "PASS" if outcome == "PASSED" else "FAIL"
        terminalreporter.write_line(f"[{verdict}] criterion {n:2d}: {text} ({dur:.2f}s)")


def star_polygon(rng, cx, cy, r_lo, r_hi, n_vertices):
    """Random star-shaped polygon; angular gaps stay below pi, so the ring is simple."""
    k = np.arange(n_vertices)
    ang = 2 * math.pi * (k + 0.5 + rng.uniform(-0.15, 0.15, n_vertices)) / n_vertices
    rad = rng.uniform(r_lo, r_hi, n_vertices)
    return validate([(cx + r * math.cos(a), cy + r * math.sin(a)) for a, r in zip(ang, rad)])


def random_shape(rng, extent):
    cx, cy = rng.uniform(0, extent, 2)
    if rng.random() < 0.5:
        w, h = rng.uniform(1.0, 6.0, 2)
        return rectangle(cx, cy, cx + w, cy + h)
    return star_polygon(rng, cx, cy, 1.0, 4.0, int(rng.integers(3, 9)))


def random_frame(rng, max_side=8, extent=10.0):
    """Crowded random frame; some proposals are exact or shifted copies of gt to create ties."""
    n_gt = int(rng.integers(0, max_side + 1))
    n_prop = int(rng.integers(0, max_side + 1))
    gt = [random_shape(rng, extent) for _ in range(n_gt)]
    props = []
    for _ in range(n_prop):
        u = rng.random()
        if gt and u < 0.25:
            props.append(gt[int(rng.integers(len(gt)))])
        elif gt and u < 0.5:
            src = gt[int(rng.integers(len(gt)))]
            props.append(src.translated(*rng.uniform(-1.5, 1.5, 2)))
        else:
            props.append(random_shape(rng, extent))
    return gt, props
