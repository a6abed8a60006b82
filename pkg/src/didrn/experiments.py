"""Experiment building blocks shared by the CLI and the scripts.

Each function is deterministic given its arguments; all randomness comes from
explicit seeds.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence

import numpy as np

from .datagen import SyntheticConfig, generate, resample
from .dynamic import DynamicConfig, TrainParams, fit_prefix, run_dynamic, run_static
from .metrics import MetricsReport, evaluate
from .network import Network, NetworkConfig, init_network
from .pipeline import TimeSeries

logger = logging.getLogger(__name__)

# 7200 of 8784 ten-minute readings were used for training on the detector data
DEFAULT_TRAIN_FRACTION = 7200 / 8784
MIN_SWEEP_POINTS = 50


def split_index(n: int, train_fraction: float = DEFAULT_TRAIN_FRACTION) -> int:
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must lie in (0, 1)")
    idx = int(round(n * train_fraction))
    if idx < 3 or idx >= n:
        raise ValueError(f"train fraction {train_fraction} gives unusable split {idx} of {n}")
    return idx


def persistence(series: TimeSeries, split: int):
    """Previous observed flow as the forecast."""
    pred = series.values[split - 1 : -1]
    return pred, evaluate(pred, series.values[split:])


@dataclass
class ModelResult:
    name: str
    metrics: MetricsReport
    predictions: np.ndarray
    network: Optional[Network] = None
    history: List[float] = field(default_factory=list)


def train_and_test(
    series: TimeSeries, config: NetworkConfig, params: TrainParams, split: int
) -> ModelResult:
    net = init_network(config, params.seed)
    net, _, history = fit_prefix(net, series, split, params)
    pred, metrics = run_static(net, series, split)
    return ModelResult(config.topology, metrics, pred, net, history)


def compare_models(
    series: TimeSeries,
    config: NetworkConfig,
    params: TrainParams,
    split: int,
    topologies: Sequence[str] = ("didrn", "drn", "plain"),
) -> List[ModelResult]:
    """Train each topology with the same seed and score it next to persistence."""
    results = [train_and_test(series, replace(config, topology=t), params, split) for t in topologies]
    pred, m = persistence(series, split)
    results.append(ModelResult("persistence", m, pred))
    return results


@dataclass
class SweepRow:
    interval_minutes: int
    n_points: int
    metrics: Optional[MetricsReport]  # None when skipped

    @property
    def skipped(self) -> bool:
        return self.metrics is None


def sweep_intervals(
    series: TimeSeries,
    strides: Sequence[int],
    config: NetworkConfig,
    params: TrainParams,
    mode: str = "sum",
    train_fraction: float = DEFAULT_TRAIN_FRACTION,
) -> List[SweepRow]:
    """Train and score one model per resampled copy of ``series``.

    Strides leaving fewer than MIN_SWEEP_POINTS points are reported as skipped.
    """
    rows = []
    for stride in strides:
        interval = series.interval_minutes * stride
        n = len(series) // stride if mode == "sum" else math.ceil(len(series) / stride)
        if n < MIN_SWEEP_POINTS:
            logger.warning("stride %d leaves %d points (< %d); skipped", stride, n, MIN_SWEEP_POINTS)
            rows.append(SweepRow(interval, n, None))
            continue
        coarse = resample(series, stride, mode)
        res = train_and_test(coarse, config, params, split_index(len(coarse), train_fraction))
        rows.append(SweepRow(interval, n, res.metrics))
    return rows


def level_shift_series(cfg: SyntheticConfig, train_fraction: float, shift_fraction: float):
    """Synthetic series with a step of ``shift_fraction`` x mean training flow at the split.

    Returns (series, split index).
    """
    split = split_index(cfg.length, train_fraction)
    base = generate(replace(cfg, level_shift=None))
    magnitude = shift_fraction * float(base.values[:split].mean())
    return generate(replace(cfg, level_shift=(split, magnitude))), split


def static_vs_dynamic(
    series: TimeSeries,
    split: int,
    config: NetworkConfig,
    params: TrainParams,
    dyn: DynamicConfig,
) -> Dict[str, object]:
    """Pre-train once, then run the static and dynamic arms from the same weights."""
    net = init_network(config, params.seed)
    net, _, _ = fit_prefix(net, series, split, params)
    static_pred, static_metrics = run_static(net, series, split)
    report = run_dynamic(net, series, split, dyn, params)
    return {
        "static_predictions": static_pred,
        "static": static_metrics,
        "dynamic": report.metrics,
        "report": report,
    }
