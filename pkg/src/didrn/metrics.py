"""RMSE / MAPE / MAE for flow predictions."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .exceptions import DataError, DimensionError


@dataclass(frozen=True)
class MetricsReport:
    rmse: float
    mape: float  # percent
    mae: float
    n_used: int
    n_skipped_zero: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


def evaluate(pred, truth, zero_policy="skip", epsilon: float = 1.0) -> MetricsReport:
    """Score predictions against observed values.

    RMSE and MAE always use every pair. ``zero_policy`` only affects MAPE,
    which is undefined where the truth is 0:

    * ``"skip"``: leave those pairs out of MAPE and count them in ``n_skipped_zero``
    * ``"epsilon"``: divide by ``max(y, epsilon)`` instead
    * ``"error"``: raise DataError

    If every truth value is zero under ``"skip"``, MAPE is NaN.
    """
    pred = np.asarray(pred, dtype=np.float64).reshape(-1)
    truth = np.asarray(truth, dtype=np.float64).reshape(-1)
    if pred.size == 0:
        raise DataError("cannot evaluate an empty prediction")
    if pred.size != truth.size:
        raise DimensionError("truth", pred.size, truth.size)

    err = pred - truth
    abs_err = np.abs(err)
    rmse = float(np.sqrt(np.mean(err * err)))
    mae = float(np.mean(abs_err))

    zero = truth == 0
    skipped = 0
    if zero_policy == "skip":
        skipped = int(zero.sum())
        keep = ~zero
        mape = float(np.mean(abs_err[keep] / truth[keep]) * 100.0) if keep.any() else float("nan")
    elif zero_policy == "epsilon":
        mape = float(np.mean(abs_err / np.maximum(truth, epsilon)) * 100.0)
    elif zero_policy == "error":
        if zero.any():
            raise DataError(f"zero truth value at index {int(np.argmax(zero))}; MAPE undefined")
        mape = float(np.mean(abs_err / truth) * 100.0)
    else:
        raise ValueError(f"unknown zero_policy {zero_policy!r}")
    return MetricsReport(rmse, mape, mae, int(pred.size) - skipped, skipped)
