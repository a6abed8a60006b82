"""Synthetic traffic-flow series, CSV I/O and interval resampling."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from .exceptions import DataError
from .pipeline import TimeSeries

MINUTES_PER_DAY = 1440


@dataclass(frozen=True)
class SyntheticConfig:
    """Parameters of the synthetic detector.

    Flows are per-interval vehicle counts: ``base_flow`` plus a morning and an
    evening Gaussian bump (``peak_width_hours`` std), scaled by
    ``weekend_factor`` on Saturdays and Sundays, plus iid Gaussian noise.
    ``level_shift = (index, magnitude)`` adds ``magnitude`` from ``index`` on.
    """

    days: int = 61
    interval_minutes: int = 10
    base_flow: float = 400.0
    morning_peak: float = 600.0
    morning_hour: float = 8.0
    evening_peak: float = 500.0
    evening_hour: float = 18.0
    peak_width_hours: float = 2.0
    weekend_factor: float = 0.7
    noise_std: float = 30.0
    level_shift: Optional[Tuple[int, float]] = None
    seed: int = 1
    start: datetime = datetime(2013, 6, 1)
    detector_id: str = "synthetic"

    def __post_init__(self):
        if self.days < 1:
            raise DataError("days must be >= 1")
        if self.interval_minutes < 1 or MINUTES_PER_DAY % self.interval_minutes:
            raise DataError(f"interval {self.interval_minutes} min does not divide a day")
        if not 0 < self.weekend_factor <= 1:
            raise DataError("weekend_factor must lie in (0, 1]")
        if self.base_flow < 0 or self.noise_std < 0:
            raise DataError("base_flow and noise_std must be >= 0")

    @property
    def length(self) -> int:
        return self.days * (MINUTES_PER_DAY // self.interval_minutes)


def daily_profile(hours, cfg: SyntheticConfig) -> np.ndarray:
    """Noise-free weekday flow at the given hour(s) of day."""
    h = np.asarray(hours, dtype=np.float64)
    two_var = 2.0 * cfg.peak_width_hours**2
    return (
        cfg.base_flow
        + cfg.morning_peak * np.exp(-((h - cfg.morning_hour) ** 2) / two_var)
        + cfg.evening_peak * np.exp(-((h - cfg.evening_hour) ** 2) / two_var)
    )


def generate(cfg: SyntheticConfig) -> TimeSeries:
    n = cfg.length
    minutes = np.arange(n) * cfg.interval_minutes
    hours = (minutes % MINUTES_PER_DAY) / 60.0
    flow = daily_profile(hours, cfg)

    start_weekday = cfg.start.weekday()
    weekday = (start_weekday + minutes // MINUTES_PER_DAY) % 7
    flow = np.where(weekday >= 5, flow * cfg.weekend_factor, flow)

    rng = np.random.default_rng(cfg.seed)
    if cfg.noise_std > 0:
        flow = flow + rng.normal(0.0, cfg.noise_std, n)
    if cfg.level_shift is not None:
        at, magnitude = cfg.level_shift
        flow[int(at):] += magnitude
    return TimeSeries(np.maximum(flow, 0.0), cfg.interval_minutes, cfg.detector_id, cfg.start)


def resample(series: TimeSeries, stride: int, mode: str = "sum") -> TimeSeries:
    """Coarsen a series by an integer factor.

    ``subsample`` keeps every ``stride``-th point (ceil(n/stride) points);
    ``sum`` totals complete windows of ``stride`` points (floor(n/stride)).
    """
    if stride < 1:
        raise DataError("stride must be >= 1")
    v = series.values
    if mode == "subsample":
        out = v[::stride]
    elif mode == "sum":
        m = v.size // stride
        if m == 0:
            raise DataError(f"series of length {v.size} has no complete window of {stride}")
        out = v[: m * stride].reshape(m, stride).sum(axis=1)
    else:
        raise ValueError(f"unknown resample mode {mode!r}")
    return TimeSeries(out, series.interval_minutes * stride, series.detector_id, series.start_timestamp)


def write_csv(series: TimeSeries, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["timestamp", "flow"])
        for ts, v in zip(series.timestamps(), series.values):
            w.writerow([ts.isoformat(), repr(float(v))])


def load_csv(path, detector_id: Optional[str] = None) -> TimeSeries:
    """Read a ``timestamp,flow`` file with strictly increasing, evenly spaced timestamps.

    Errors name the 1-based file line (the header is line 1).
    """
    path = Path(path)
    times, values = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["timestamp", "flow"]:
            raise DataError(f"{path}: line 1: expected header 'timestamp,flow', got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < 2:
                raise DataError(f"{path}: line {lineno}: expected 2 columns, got {len(row)}")
            try:
                ts = datetime.fromisoformat(row[0].strip())
                v = float(row[1])
            except ValueError as exc:
                raise DataError(f"{path}: line {lineno}: unparsable row {row}: {exc}") from None
            if not math.isfinite(v):
                raise DataError(f"{path}: line {lineno}: non-finite flow {row[1]!r}")
            if times:
                if ts <= times[-1]:
                    raise DataError(f"{path}: line {lineno}: timestamp {ts} does not increase")
                if len(times) >= 2 and ts - times[-1] != times[1] - times[0]:
                    raise DataError(f"{path}: line {lineno}: irregular sampling interval")
            times.append(ts)
            values.append(v)
    if not values:
        raise DataError(f"{path}: no data rows")
    step = (times[1] - times[0]) if len(times) > 1 else timedelta(minutes=10)
    interval = step.total_seconds() / 60.0
    if interval != int(interval):
        raise DataError(f"{path}: interval {interval} min is not a whole number of minutes")
    return TimeSeries(np.array(values), int(interval), detector_id or path.stem, times[0])
