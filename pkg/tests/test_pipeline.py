import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import scalar_net
from didrn.exceptions import DataError
from didrn.network import NetworkConfig, forward, init_network
from didrn.pipeline import (
    ScalerParams,
    TimeSeries,
    apply_scale,
    build_training_set,
    difference,
    fit_scaler,
    frame_supervised,
    invert_difference,
    invert_scale,
    predict_series,
)


@pytest.mark.parametrize(
    "r, d", [([5, 8, 6, 6], [3, -2, 0]), ([7, 7, 7], [0, 0]), ([0, 10], [10])]
)
def test_difference_examples(r, d):
    np.testing.assert_array_equal(difference(TimeSeries(r)), d)


def test_difference_needs_two_points():
    with pytest.raises(DataError):
        difference([1.0])


@pytest.mark.parametrize(
    "anchor, d, expected", [(5, [3, -2, 0], [8, 6, 6]), (4.2, [], []), (0, [1, 1, 1], [1, 2, 3])]
)
def test_invert_difference_examples(anchor, d, expected):
    np.testing.assert_array_equal(invert_difference(anchor, d), expected)


@given(st.lists(st.integers(-10_000, 10_000), min_size=2, max_size=300))
def test_difference_round_trip_exact(r):
    r = np.array(r, dtype=float)
    np.testing.assert_array_equal(invert_difference(r[0], difference(r)), r[1:])


def _sliding_window(d, lag):
    rows = []
    for j in range(len(d)):
        rows.append([d[k] if k >= 0 else 0.0 for k in range(j - lag, j)])
    return np.array(rows, dtype=float)


@pytest.mark.parametrize(
    "d, lag, x, y",
    [
        ([3, -2, 0], 1, [[0], [3], [-2]], [3, -2, 0]),
        ([2.5], 1, [[0]], [2.5]),
        ([1, 2, 3], 2, [[0, 0], [0, 1], [1, 2]], [1, 2, 3]),
    ],
)
def test_frame_examples(d, lag, x, y):
    xs, ys = frame_supervised(d, lag)
    np.testing.assert_array_equal(xs, x)
    np.testing.assert_array_equal(ys, y)
    np.testing.assert_array_equal(xs, _sliding_window(d, lag))


def test_frame_rejects_empty():
    with pytest.raises(DataError):
        frame_supervised([], 1)


@settings(max_examples=100)
@given(
    st.lists(st.floats(-1e4, 1e4, allow_nan=False), min_size=1, max_size=60),
    st.integers(1, 5),
)
def test_framing_alignment(d, lag):
    x, y = frame_supervised(d, lag)
    assert len(x) == len(y) == len(d)
    np.testing.assert_array_equal(y, d)
    for i in range(1, len(d)):
        assert x[i, -1] == d[i - 1]
    np.testing.assert_array_equal(x, _sliding_window(d, lag))


def test_fit_scaler_examples():
    s = fit_scaler([0, 3, -2], [3, -2, 0])
    assert (s.x_min, s.x_max, s.y_min, s.y_max) == (-2, 3, -2, 3)
    with pytest.raises(DataError, match="degenerate"):
        fit_scaler([5, 5, 5], [1, 2, 3])
    with pytest.raises(DataError):
        ScalerParams(0, 0, 0, 1)


@pytest.mark.parametrize("v, expected", [(0, -0.2), (3, 1.0), (-2, -1.0)])
def test_apply_scale_examples(v, expected):
    assert apply_scale(v, -2, 3) == pytest.approx(expected, abs=1e-15)


def test_scale_rejects_bad_range():
    with pytest.raises(DataError):
        apply_scale(1.0, 2.0, 2.0)
    with pytest.raises(DataError):
        invert_scale(1.0, 3.0, 2.0)


def test_scale_round_trip_many_values():
    rng = np.random.default_rng(0)
    lo, hi = -37.5, 112.25
    v = rng.uniform(-500, 500, 10_000)  # inside and outside the range
    assert np.max(np.abs(invert_scale(apply_scale(v, lo, hi), lo, hi) - v)) < 1e-12


def test_build_training_set_in_range():
    data = build_training_set(np.cumsum(np.random.default_rng(2).normal(size=100)) + 50)
    assert data.X.min() == -1.0 and data.X.max() <= 1.0
    assert data.Y.min() == -1.0 and data.Y.max() == 1.0
    assert len(data) == 99 and data.lag == 1


class TestPredictSeries:
    def test_zero_network_with_symmetric_range_is_persistence(self):
        net = scalar_net("plain", [0.0])
        series = TimeSeries([10.0, 12.0, 9.0, 15.0, 11.0, 30.0])
        pred = predict_series(net, series, ScalerParams(-5, 5, -7, 7), 1, 5)
        np.testing.assert_array_equal(pred, series.values[:-1])

    def test_horizon_zero(self):
        net = scalar_net("plain", [0.0])
        assert predict_series(net, TimeSeries([1.0, 2.0]), ScalerParams(-1, 1, -1, 1), 1, 0).size == 0

    def test_bad_ranges(self):
        net = scalar_net("plain", [0.0])
        s = TimeSeries([1.0, 2.0, 3.0])
        with pytest.raises(DataError):
            predict_series(net, s, ScalerParams(-1, 1, -1, 1), 2, 2)
        with pytest.raises(DataError):
            predict_series(net, s, ScalerParams(-1, 1, -1, 1), 0, 1)

    @pytest.mark.parametrize("lag", [1, 3])
    def test_matches_step_by_step_oracle(self, lag):
        rng = np.random.default_rng(lag)
        r = 300 + np.cumsum(rng.normal(0, 20, 50))
        net = init_network(NetworkConfig("didrn", lag, 6, 3), 4)
        sc = ScalerParams(-40.0, 35.0, -38.0, 41.0)
        start, horizon = 5, 45
        expected = []
        for t in range(start, start + horizon):
            feats = []
            for k in range(lag, 0, -1):
                j = t - 1 - k  # D[j] = R[j+1] - R[j]
                feats.append(r[j + 1] - r[j] if j >= 0 else 0.0)
            xs = [2 * (f - sc.x_min) / (sc.x_max - sc.x_min) - 1 for f in feats]
            s = forward(net, np.array(xs))[0]
            expected.append(r[t - 1] + (s + 1) * (sc.y_max - sc.y_min) / 2 + sc.y_min)
        got = predict_series(net, TimeSeries(r), sc, start, horizon)
        np.testing.assert_allclose(got, expected, rtol=1e-12)

    def test_causal(self):
        rng = np.random.default_rng(3)
        r = 100 + rng.normal(0, 5, 40)
        net = init_network(NetworkConfig("didrn", 2, 4, 2), 0)
        sc = ScalerParams(-10, 10, -10, 10)
        base = predict_series(net, TimeSeries(r), sc, 1, 39)
        for t in range(1, 40):
            corrupted = r.copy()
            corrupted[t:] = 1e9
            pred = predict_series(net, TimeSeries(corrupted), sc, 1, 39)
            assert pred[t - 1] == base[t - 1]
