"""Empirical geometric decay rates and ratio diagnostics for trajectories."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ArgumentError
from .validation import check_probability_range

# fit points below this fraction of the series' first value are treated as
# machine-precision floor and excluded
FLOOR_FRACTION = 1e-13


@dataclass(frozen=True)
class RateEstimate:
    """Log-linear fit of a decaying series: value(t) ~ const * rate**t."""

    rate: float
    window: tuple[int, int]
    residual: float
    n_points: int


def estimate_rate(series, window: tuple[int, int] | None = None) -> RateEstimate:
    """Least-squares geometric rate over a half-open index window [start, end).

    Nonpositive values and values below FLOOR_FRACTION times the series'
    first element are excluded from the fit; at least 5 usable points are
    required.  The rate is exp(slope) of the log-linear fit and residual
    is the root-mean-square misfit of log(series).
    """
    values = np.asarray(series, dtype=float)
    if values.ndim != 1:
        raise ArgumentError(f"series must be 1-D, got shape {values.shape}")
    if window is None:
        window = (0, values.size)
    start, end = int(window[0]), int(window[1])
    if not (0 <= start < end <= values.size):
        raise ArgumentError(f"window {window} invalid for series of length {values.size}")
    if not np.any(values > 0):
        raise ArgumentError("series has no positive values to fit")
    floor = FLOOR_FRACTION * values[0] if values[0] > 0 else 0.0
    t = np.arange(start, end)
    v = values[start:end]
    keep = v > max(floor, 0.0)
    if keep.sum() < 5:
        raise ArgumentError(
            f"window too short: {int(keep.sum())} usable points after exclusions, need 5"
        )
    logs = np.log(v[keep])
    slope, intercept = np.polyfit(t[keep], logs, 1)
    fit = slope * t[keep] + intercept
    residual = float(np.sqrt(np.mean((logs - fit) ** 2)))
    return RateEstimate(rate=float(np.exp(slope)), window=(start, end),
                        residual=residual, n_points=int(keep.sum()))


def ratio_series(series, rate: float) -> np.ndarray:
    """Elementwise series(t) / rate**t."""
    rate = check_probability_range(rate, "rate", include_low=False)
    values = np.asarray(series, dtype=float)
    if values.ndim != 1:
        raise ArgumentError(f"series must be 1-D, got shape {values.shape}")
    return values / rate ** np.arange(values.size)


def tail_monotone(series, direction: str = "decreasing", tail_fraction: float = 0.3,
                  max_violation_fraction: float = 0.05) -> bool:
    """Check the trend of the last tail_fraction of a series.

    A pair violates a decreasing trend when the later value is strictly
    larger (plateaus are fine, they happen at the precision floor), and
    symmetrically for increasing.  Up to max_violation_fraction of
    adjacent pairs may violate.
    """
    if direction not in ("decreasing", "increasing"):
        raise ArgumentError(f"direction must be 'decreasing' or 'increasing', got {direction!r}")
    values = np.asarray(series, dtype=float)
    if values.ndim != 1 or values.size < 2:
        raise ArgumentError("series must be 1-D with at least 2 entries")
    tail_len = max(int(np.ceil(tail_fraction * values.size)), 2)
    tail = values[-tail_len:]
    if direction == "decreasing":
        violations = tail[1:] > tail[:-1]
    else:
        violations = tail[1:] < tail[:-1]
    return float(violations.mean()) <= max_violation_fraction
