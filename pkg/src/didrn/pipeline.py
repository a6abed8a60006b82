"""Differencing, supervised framing and (-1, 1) scaling of flow series.

Index conventions (0-based): ``D[j] = R[j+1] - R[j]``. The supervised row
for target ``D[j]`` holds ``D[j-lag] .. D[j-1]``, zero-padded where the index
is negative. A flow ``R[t]`` is therefore predicted as
``R[t-1] + Dhat[t-1]`` using only observations up to ``t-1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Sequence, Tuple

import numpy as np

from .exceptions import DataError
from .network import Network, forward


@dataclass
class TimeSeries:
    values: np.ndarray
    interval_minutes: int = 10
    detector_id: str = "synthetic"
    start_timestamp: datetime = datetime(2013, 6, 1)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if self.values.size == 0:
            raise DataError("time series is empty")
        if not np.all(np.isfinite(self.values)):
            raise DataError("time series contains non-finite values")
        if self.interval_minutes < 1:
            raise DataError("interval_minutes must be positive")

    def __len__(self):
        return self.values.size

    def timestamps(self):
        step = timedelta(minutes=self.interval_minutes)
        return [self.start_timestamp + i * step for i in range(len(self))]

    def with_values(self, values) -> "TimeSeries":
        return TimeSeries(values, self.interval_minutes, self.detector_id, self.start_timestamp)


@dataclass(frozen=True)
class ScalerParams:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise DataError(f"degenerate scaling range: {self}")


@dataclass
class SupervisedSet:
    X: np.ndarray  # (n, lag), scaled
    Y: np.ndarray  # (n,), scaled
    scaler: ScalerParams
    lag: int

    def __len__(self):
        return self.Y.size


def difference(series) -> np.ndarray:
    r = np.asarray(getattr(series, "values", series), dtype=np.float64)
    if r.size < 2:
        raise DataError("differencing needs at least 2 values")
    return r[1:] - r[:-1]


def invert_difference(anchor: float, d_hat) -> np.ndarray:
    """Cumulative reconstruction ``anchor + cumsum(d_hat)``.

    Accumulates left to right in float64 so integer-valued round trips are exact.
    """
    return anchor + np.cumsum(np.asarray(d_hat, dtype=np.float64))


def frame_supervised(d, lag: int = 1) -> Tuple[np.ndarray, np.ndarray]:
    d = np.asarray(d, dtype=np.float64).reshape(-1)
    if d.size == 0:
        raise DataError("cannot frame an empty difference vector")
    if lag < 1:
        raise DataError("lag must be >= 1")
    padded = np.concatenate([np.zeros(lag), d])
    x = np.stack([padded[k : k + d.size] for k in range(lag)], axis=1)
    return x, d.copy()


def fit_scaler(x_raw, y_raw) -> ScalerParams:
    """Min/max of the given (training) features and targets.

    Raises DataError when either range is degenerate.
    """
    x = np.asarray(x_raw, dtype=np.float64)
    y = np.asarray(y_raw, dtype=np.float64)
    if x.size == 0 or y.size == 0:
        raise DataError("cannot fit a scaler on empty data")
    x_min, x_max, y_min, y_max = float(x.min()), float(x.max()), float(y.min()), float(y.max())
    if not (x_max > x_min and y_max > y_min):
        raise DataError(f"degenerate range: x in [{x_min}, {x_max}], y in [{y_min}, {y_max}]")
    return ScalerParams(x_min, x_max, y_min, y_max)


def apply_scale(v, lo: float, hi: float):
    if not hi > lo:
        raise DataError(f"scaling range must satisfy hi > lo, got [{lo}, {hi}]")
    return 2.0 * (np.asarray(v, dtype=np.float64) - lo) / (hi - lo) - 1.0


def invert_scale(s, lo: float, hi: float):
    if not hi > lo:
        raise DataError(f"scaling range must satisfy hi > lo, got [{lo}, {hi}]")
    return (np.asarray(s, dtype=np.float64) + 1.0) * (hi - lo) / 2.0 + lo


def build_training_set(values: Sequence[float], lag: int = 1) -> SupervisedSet:
    """Difference, frame and scale a training slice of raw flows."""
    x_raw, y_raw = frame_supervised(difference(values), lag)
    scaler = fit_scaler(x_raw, y_raw)
    return SupervisedSet(
        apply_scale(x_raw, scaler.x_min, scaler.x_max),
        apply_scale(y_raw, scaler.y_min, scaler.y_max),
        scaler,
        lag,
    )


def predict_series(
    net: Network, series, scaler: ScalerParams, start_index: int, horizon: int
) -> np.ndarray:
    """One-step-ahead predictions of ``R[start_index : start_index + horizon]``.

    Each step feeds the scaled observed differences before ``t - 1``, unscales
    the predicted difference with the target range and adds it to the observed
    flow ``R[t-1]``.
    """
    r = np.asarray(getattr(series, "values", series), dtype=np.float64)
    lag = net.config.input_dim
    if horizon < 0:
        raise DataError("horizon must be >= 0")
    if start_index < 1:
        raise DataError("start_index must be >= 1")
    if start_index + horizon > r.size:
        raise DataError(
            f"horizon {horizon} from index {start_index} exceeds series length {r.size}"
        )
    if horizon == 0:
        return np.zeros(0)
    stop = start_index + horizon
    # targets are D[t-1] for t in [start, stop); only D[.. stop-3] is ever read
    x_raw, _ = frame_supervised(r[1:stop] - r[: stop - 1], lag)
    feats = x_raw[start_index - 1 : stop - 1]
    scaled = forward(net, apply_scale(feats, scaler.x_min, scaler.x_max))[:, 0]
    d_hat = invert_scale(scaled, scaler.y_min, scaler.y_max)
    return r[start_index - 1 : stop - 1] + d_hat
