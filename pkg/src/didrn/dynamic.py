"""Static and incrementally retrained (dynamic) prediction over a test segment.

The dynamic loop alternates: predict ``update_horizon`` steps, append the
newly observed flows to the training set, retrain, repeat until the series
is exhausted. Retraining happens only when more data remain to be predicted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .exceptions import DataError
from .metrics import MetricsReport, evaluate
from .network import Network, init_network, train
from .nn import OptimizerState
from .pipeline import ScalerParams, TimeSeries, build_training_set, predict_series


@dataclass(frozen=True)
class TrainParams:
    epochs: int = 40
    batch_size: int = 64
    learning_rate: float = 1e-3
    lr_decay: float = 0.9
    optimizer: str = "adam"
    seed: int = 1

    def optimizer_state(self) -> OptimizerState:
        return OptimizerState(self.optimizer, self.learning_rate)


@dataclass(frozen=True)
class DynamicConfig:
    update_horizon: int = 144
    retrain_epochs: int = 20
    warm_start: bool = True
    window: str = "grow"  # or "sliding"
    window_len: Optional[int] = None

    def __post_init__(self):
        if self.update_horizon < 1 or self.retrain_epochs < 1:
            raise DataError("update_horizon and retrain_epochs must be >= 1")
        if self.window not in ("grow", "sliding"):
            raise DataError(f"unknown window policy {self.window!r}")
        if self.window == "sliding":
            if self.window_len is None or self.window_len < self.update_horizon:
                raise DataError("sliding window_len must be >= update_horizon")


@dataclass
class CycleRecord:
    cycle: int
    start_index: int
    metrics: MetricsReport
    train_len: int


@dataclass
class DynamicRunReport:
    predictions: np.ndarray
    truth: np.ndarray
    split_index: int
    cycles: List[CycleRecord] = field(default_factory=list)
    retrain_count: int = 0

    @property
    def metrics(self) -> MetricsReport:
        return evaluate(self.predictions, self.truth)


def fit_prefix(net: Network, series: TimeSeries, end: int, params: TrainParams, start: int = 0):
    """Train ``net`` on flows ``[start, end)``; returns (trained net, scaler, loss history)."""
    data = build_training_set(series.values[start:end], net.config.input_dim)
    trained, history = train(
        net,
        data.X,
        data.Y,
        params.epochs,
        params.batch_size,
        params.optimizer_state(),
        params.seed,
        params.lr_decay,
    )
    return trained, data.scaler, history


def _check_split(series: TimeSeries, split_index: int) -> None:
    if not 3 <= split_index < len(series):
        raise DataError(f"split_index {split_index} out of range for series of length {len(series)}")


def training_scaler(series: TimeSeries, end: int, lag: int, start: int = 0) -> ScalerParams:
    return build_training_set(series.values[start:end], lag).scaler


def run_static(net: Network, series: TimeSeries, split_index: int):
    """Predict the whole test segment with a fixed model.

    The scaler is refit on ``[0, split_index)``, the slice the model was
    pre-trained on. Returns (predictions, MetricsReport).
    """
    _check_split(series, split_index)
    scaler = training_scaler(series, split_index, net.config.input_dim)
    horizon = len(series) - split_index
    pred = predict_series(net, series, scaler, split_index, horizon)
    return pred, evaluate(pred, series.values[split_index:])


def run_dynamic(
    net: Network,
    series: TimeSeries,
    split_index: int,
    dyn: DynamicConfig,
    params: TrainParams,
) -> DynamicRunReport:
    """Alternate prediction and retraining phases over ``[split_index, len)``.

    ``net`` must already be trained on ``[0, split_index)``. Each retrain
    rebuilds the training set (and its scaler) from the current window and
    runs ``dyn.retrain_epochs`` epochs, from the current weights when
    ``warm_start`` is set and from a fresh ``params.seed`` init otherwise.
    Cycle ``k`` retrains with seed ``params.seed + k``.
    """
    _check_split(series, split_index)
    n = len(series)
    lag = net.config.input_dim
    truth = series.values[split_index:]
    preds = []
    report = DynamicRunReport(np.zeros(0), truth, split_index)

    train_start, train_end = 0, split_index
    scaler = training_scaler(series, train_end, lag)
    cycle = 0
    pos = split_index
    while pos < n:
        h = min(dyn.update_horizon, n - pos)
        p = predict_series(net, series, scaler, pos, h)
        preds.append(p)
        report.cycles.append(
            CycleRecord(cycle, pos, evaluate(p, series.values[pos : pos + h]), train_end - train_start)
        )
        pos += h
        if pos >= n:
            break
        train_end = pos
        if dyn.window == "sliding":
            train_start = max(0, train_end - dyn.window_len)
        cycle += 1
        base = net if dyn.warm_start else init_network(net.config, params.seed)
        data = build_training_set(series.values[train_start:train_end], lag)
        net, _ = train(
            base,
            data.X,
            data.Y,
            dyn.retrain_epochs,
            params.batch_size,
            params.optimizer_state(),
            params.seed + cycle,
            params.lr_decay,
        )
        scaler = data.scaler
        report.retrain_count += 1
    report.predictions = np.concatenate(preds)
    return report
