"""Forecast errors, hold-out splitting and capacity recommendations."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .network import predict_series


def rmse(actual, predicted):
    actual = np.asarray(actual, dtype=float)
    predicted = np.asarray(predicted, dtype=float)
    if actual.shape != predicted.shape:
        raise ValueError(f"length mismatch: {actual.shape} vs {predicted.shape}")
    if actual.size == 0:
        raise ValueError("rmse of an empty sequence")
    return math.sqrt(float(np.mean((actual - predicted) ** 2)))


def relative_error(rmse_value, actual):
    """RMSE relative to the mean of the actual values."""
    mean = float(np.mean(np.asarray(actual, dtype=float)))
    if not mean > 0:
        raise ValueError(f"relative error needs a positive mean, got {mean}")
    return rmse_value / mean


def split_series(series, holdout_hours):
    """Split off the last ``holdout_hours`` samples as the test set."""
    n = len(series)
    if not 0 <= holdout_hours < n:
        raise ValueError(f"holdout of {holdout_hours} must be in [0, {n})")
    return series.slice(0, n - holdout_hours), series.slice(n - holdout_hours, n)


@dataclass
class ForecastReport:
    horizon: int
    hours: np.ndarray  # time index of each forecast target
    actual: np.ndarray
    predicted: np.ndarray

    def __post_init__(self):
        self.hours = np.asarray(self.hours, dtype=int)
        self.actual = np.asarray(self.actual, dtype=float)
        self.predicted = np.asarray(self.predicted, dtype=float)

    @property
    def rmse(self):
        return rmse(self.actual, self.predicted)

    @property
    def relative_error(self):
        return relative_error(self.rmse, self.actual)

    @property
    def window(self):
        return (int(self.hours[0]), int(self.hours[-1])) if self.hours.size else None

    def summary(self):
        return {"horizon": self.horizon, "n": int(self.hours.size), "window": self.window,
                "rmse": self.rmse, "relative_error": self.relative_error}


def evaluate(model, series, holdout_hours):
    """Forecast over ``series`` and score the targets inside the hold-out suffix.

    The whole series is used as input history, so forecasts for the first
    hold-out hours still see observed training-period values, but every scored
    target lies in the hold-out window.
    """
    n = len(series)
    if not 0 < holdout_hours < n:
        raise ValueError(f"holdout of {holdout_hours} must be in (0, {n})")
    pred = predict_series(model, series)
    keep = pred.indices >= n - holdout_hours
    hours = pred.indices[keep]
    return ForecastReport(pred.horizon, hours, series.values[hours], pred.values[keep])


def emit_plot_data(report, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("hour,actual,predicted,abs_error\n")
        for h, a, p in zip(report.hours, report.actual, report.predicted):
            fh.write(f"{h},{float(a)!r},{float(p)!r},{float(abs(a - p))!r}\n")


def read_plot_data(path):
    """Parse a file written by :func:`emit_plot_data` back into a report."""
    with open(path, encoding="utf-8") as fh:
        rows = [line.split(",") for line in fh.read().splitlines()[1:] if line.strip()]
    data = np.array(rows, dtype=float).reshape(-1, 4)
    return ForecastReport(0, data[:, 0].astype(int), data[:, 1], data[:, 2])


@dataclass
class CapacityPlan:
    hours: np.ndarray
    capacity: np.ndarray
    headroom: float

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("hour,capacity\n")
            for h, c in zip(self.hours, self.capacity):
                fh.write(f"{h},{c}\n")


def recommend_capacity(report, headroom):
    """Capacity per hour: forecast inflated by ``headroom``, rounded up.

    ``predicted * (1 + headroom)`` is rounded to 9 decimals before the ceiling
    so that e.g. ``100 * 1.1`` gives 110 and not 111.
    """
    if not headroom >= 0:
        raise ValueError(f"headroom must be non-negative, got {headroom}")
    predicted = np.asarray(getattr(report, "predicted", report), dtype=float)
    hours = getattr(report, "hours", np.arange(predicted.size))
    needed = np.ceil(np.round(predicted * (1.0 + headroom), 9))
    return CapacityPlan(np.asarray(hours), needed.astype(np.int64), float(headroom))
