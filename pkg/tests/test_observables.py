import math

import numpy as np
import pytest

from lattice.parameters import critical_h
from lattice.sos_model import level_census
from observables.bounds import (
    contact_bound,
    critical_downward_bound,
    downward_bound,
    isolated_zero_prediction,
    non_isolated_bound,
)
from observables.counters import (
    downward_excess,
    make_hooks,
    mode_heights,
    theorem_events,
    typical_level_fraction,
    upward_excess,
    zero_counts,
)
from observables.series import (
    batch_means,
    build_series,
    fit_exponent,
    paired_difference,
    separated,
    series_from_stream,
    stream_frame,
    worst_rise,
)
from utils.data_models import HeightField, Parameters, SampleStream

# H = 4 and H_w = 2 at this (beta, N)
PARAMS = Parameters(beta=0.25, h=0.0, N=64)


def test_upward_excess():
    assert upward_excess(HeightField.constant(64, 0), PARAMS, 1) == 0
    assert upward_excess(HeightField.constant(64, 6), PARAMS, 2) == 64 * 64


def test_upward_excess_agrees_with_census(rng):
    field = HeightField(heights=rng.integers(0, 9, size=(64, 64)))
    census = level_census(field)
    for m in (1, 2, 3):
        assert upward_excess(field, PARAMS, m) == census.count_between(4 + m, None)


def test_downward_excess():
    assert downward_excess(HeightField.constant(64, 4), PARAMS, 1) == 0
    assert downward_excess(HeightField.constant(64, 0), PARAMS, 1) == 64 * 64
    assert downward_excess(np.zeros((64, 64), dtype=int), PARAMS, 5) == 0


def test_excess_counts_partition_the_box(rng):
    heights = rng.integers(0, 9, size=(64, 64))
    for m in (1, 2, 3):
        assert upward_excess(heights, PARAMS, m) + downward_excess(heights, PARAMS, 1 - m) == 64 * 64


def test_critical_downward_window():
    heights = np.array([[0, 1], [2, 3]])
    params = Parameters(beta=0.25, h=critical_h(0.25), N=64)
    # window [1, H_w - 1] = [1, 1]
    assert downward_excess(heights, params, 1, critical=True) == 1


@pytest.mark.parametrize(
    "heights, expected",
    [
        (np.zeros((2, 2), dtype=int), (0, 4, 4)),
        (np.array([[1, 1, 1], [1, 0, 1], [1, 1, 1]]), (1, 0, 1)),
        (np.array([[0, 0, 1], [1, 1, 1], [1, 1, 1]]), (0, 2, 2)),
    ],
)
def test_zero_counts(heights, expected):
    assert zero_counts(HeightField(heights=heights)) == expected
    assert zero_counts(heights) == expected


def test_mode_heights():
    assert mode_heights(HeightField.constant(4, 3)) == (3, 1.0, 0.0)
    half = np.array([[2, 2], [3, 3]])
    assert mode_heights(half) == (3, 0.5, 0.5)
    mode, at_mode, below = mode_heights(np.array([[0, 5], [5, 1]]))
    assert mode == 5
    assert 0 <= at_mode + below <= 1


def test_theorem_events_at_typical_height():
    events = theorem_events(HeightField.constant(64, 4), PARAMS, 1, 1.0)
    assert not events["upward"]
    assert not events["downward"]
    assert "contact" in events


def test_theorem_events_flat_zero():
    params = Parameters(beta=1.0, h=critical_h(1.0), N=4)
    events = theorem_events(np.zeros((4, 4), dtype=int), params, 1, 1.0)
    assert events["q2plus"]
    assert "contact" not in events


def test_q2plus_threshold_is_inclusive():
    params = Parameters(beta=1.0, h=0.0, N=4)
    heights = np.full((4, 4), 2)
    heights[0, :] = 0
    assert theorem_events(heights, params, 1, 1.0)["q2plus"]
    assert not theorem_events(heights, params, 1, 1.01)["q2plus"]


def test_hooks_are_named_and_evaluate():
    hooks = make_hooks(PARAMS, [1, 2], [1.0, 2.5])
    assert {"zeros", "q1", "q2plus", "mode", "two_level_fraction", "mean_height"} <= set(hooks)
    assert "upward_excess_m2" in hooks
    assert "event_upward_m1_C2.5" in hooks
    assert "event_contact_m2_C1" in hooks
    heights = np.full((64, 64), 4)
    assert hooks["two_level_fraction"](heights) == 1.0
    assert hooks["event_upward_m1_C1"](heights) == 0.0


def test_two_level_fraction_uses_typical_height():
    # a flat field at H + 3 has its mode far from the typical height
    hooks = make_hooks(PARAMS, [1], [1.0])
    high = np.full((64, 64), 7)
    assert hooks["two_level_fraction"](high) == 0.0
    assert hooks["mode_two_level_fraction"](high) == 1.0

    heights = np.full((64, 64), 5)
    heights[:16] = 3
    heights[16:32] = 4
    assert typical_level_fraction(heights, PARAMS) == pytest.approx(0.5)
    assert typical_level_fraction(HeightField(heights=heights), PARAMS) == pytest.approx(0.5)


def test_two_level_fraction_at_zero_height():
    params = Parameters(beta=1.0, h=0.0, N=8)  # H = 0
    heights = np.zeros((8, 8), dtype=int)
    heights[0, 0] = 1
    assert typical_level_fraction(heights, params) == pytest.approx(63 / 64)


def test_batch_means_white_noise(rng):
    small = batch_means(rng.normal(size=10_000))
    large = batch_means(rng.normal(size=40_000))
    assert small.batches == 100
    assert 0.007 < small.stderr < 0.013
    assert 0.35 < large.stderr / small.stderr < 0.65


def test_batch_means_short_series():
    assert math.isnan(batch_means([1.0] * 10).stderr)
    assert batch_means(np.arange(100.0)).batches == 20
    assert batch_means(np.arange(100.0)).mean == pytest.approx(49.5)


def test_paired_difference_and_separation(rng):
    base = rng.normal(size=4000)
    shifted = base + 0.5 + 0.1 * rng.normal(size=4000)
    difference = paired_difference(shifted, base)
    assert difference.mean == pytest.approx(0.5, abs=0.02)
    assert separated(difference)
    assert not separated(paired_difference(base, base + 0.5))
    assert not separated(batch_means([1.0]))


def test_worst_rise():
    assert worst_rise([0.5, 0.4, 0.1], [0.01, 0.01, 0.01]) < 0
    # a rise of 0.1 against σ ≈ 0.014 breaks the 2σ band
    assert worst_rise([0.3, 0.4], [0.01, 0.01]) == pytest.approx(0.1 - 2.0 * math.hypot(0.01, 0.01))
    assert worst_rise([0.3, 0.32], [0.02, 0.02]) < 0
    assert worst_rise([0.2, 0.2], [float("nan"), float("nan")]) == 0.0
    assert worst_rise([0.2], [0.01]) == -math.inf


def test_fit_exponent():
    sides = [32, 64, 128]
    slope, intercept = fit_exponent(sides, [3.0 * n ** 1.5 for n in sides])
    assert slope == pytest.approx(1.5)
    assert intercept == pytest.approx(math.log(3.0))


def test_stream_helpers():
    stream = SampleStream(
        records=[{"sweep_index": 10 * i, "zeros": float(i % 3)} for i in range(1, 41)],
        metadata={"observables": ["zeros"]},
    )
    series = series_from_stream(stream)
    assert list(series) == ["zeros"]
    assert series["zeros"].summary.batches == 20
    frame = stream_frame(stream, N=8, h=0.0)
    assert list(frame.columns) == ["N", "h", "sweep_index", "zeros"]
    assert len(frame) == 40
    empty = stream_frame(SampleStream(metadata={"observables": ["zeros"]}), N=8)
    assert list(empty.columns) == ["N", "sweep_index", "zeros"]
    assert build_series("x", [1, 2, 3]).values == [1.0, 2.0, 3.0]


def test_bounds_are_probabilities():
    params = Parameters(beta=1.0, h=0.5 * critical_h(1.0), N=64)
    critical = Parameters(beta=1.0, h=critical_h(1.0), N=64)
    for value in (
        downward_bound(params, 1),
        downward_bound(params, 4),
        contact_bound(params),
        non_isolated_bound(critical, 1.0),
        critical_downward_bound(critical, 3, 1.0),
    ):
        assert 0.0 <= value <= 1.0
    assert contact_bound(params) == pytest.approx(math.exp(-64.0))
    assert isolated_zero_prediction(critical) == pytest.approx(64 ** 2 * math.exp(-4.0 * 0))
