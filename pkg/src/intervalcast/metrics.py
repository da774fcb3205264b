"""Forecast-error metrics for point series and intervals.

MSE, MAE, MAPE, and SMAPE score the center and range series
separately; SMAPE is the plain ratio form |y - yhat| / (|y| + |yhat|)
averaged over time (no factor 2, no percentage scaling), so it lies in
[0, 1].  MDE scores the interval jointly from paired center/range
predictions:

    MDE = sqrt( (1/T) sum_t sqrt( (dl_t^2 + du_t^2) / 2 ) )

where dl/du are the lower/upper bound errors (lower = center - range,
upper = center + range).  The nested square root is kept exactly as
printed in the source definition; a conventional single-root variant
(mean of per-step root-mean-square bound errors) is available behind
``variant="single_root"`` for sanity comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatch, ZeroDenominator

POINT_METRICS = ("mse", "mae", "mape", "smape")


def _pair(y, yhat):
    y = np.asarray(y, dtype=float)
    yhat = np.asarray(yhat, dtype=float)
    if y.ndim != 1 or yhat.ndim != 1 or y.size != yhat.size:
        raise LengthMismatch(f"truth shape {y.shape} vs prediction shape {yhat.shape}")
    if y.size == 0:
        raise LengthMismatch("metrics need at least one observation")
    return y, yhat


def mse(y, yhat) -> float:
    y, yhat = _pair(y, yhat)
    return float(np.mean((y - yhat) ** 2))


def mae(y, yhat) -> float:
    y, yhat = _pair(y, yhat)
    return float(np.mean(np.abs(y - yhat)))


def mape(y, yhat) -> float:
    """Mean absolute percentage error; any zero truth value is an error."""
    y, yhat = _pair(y, yhat)
    zeros = np.nonzero(y == 0.0)[0]
    if zeros.size:
        raise ZeroDenominator(f"truth value is zero at index {int(zeros[0])}")
    return float(np.mean(np.abs((y - yhat) / y)))


def smape(y, yhat) -> float:
    """Symmetric MAPE in ratio form; lies in [0, 1]."""
    y, yhat = _pair(y, yhat)
    denom = np.abs(y) + np.abs(yhat)
    zeros = np.nonzero(denom == 0.0)[0]
    if zeros.size:
        raise ZeroDenominator(f"|y| + |yhat| is zero at index {int(zeros[0])}")
    return float(np.mean(np.abs(y - yhat) / denom))


def mde(center, center_hat, rng, rng_hat, variant: str = "nested") -> float:
    """Mean distance error of the reconstructed interval bounds.

    ``nested`` (default) is the double-root form exactly as printed in
    the source definition; ``single_root`` drops the outer root.
    """
    center, center_hat = _pair(center, center_hat)
    rng, rng_hat = _pair(rng, rng_hat)
    if center.size != rng.size:
        raise LengthMismatch(f"center length {center.size} vs range length {rng.size}")
    if variant not in ("nested", "single_root"):
        raise ValueError(f"unknown mde variant {variant!r}")
    d_lower = (center - rng) - (center_hat - rng_hat)
    d_upper = (rng + center) - (rng_hat + center_hat)
    inner = np.sqrt((d_lower ** 2 + d_upper ** 2) / 2.0)
    if variant == "single_root":
        return float(np.mean(inner))
    return float(np.sqrt(np.mean(inner)))


def point_metrics(y, yhat) -> dict[str, float]:
    """All four point metrics as a name -> value dict."""
    return {
        "mse": mse(y, yhat),
        "mae": mae(y, yhat),
        "mape": mape(y, yhat),
        "smape": smape(y, yhat),
    }


@dataclass(frozen=True)
class MetricTable:
    """Center and range point metrics plus the joint interval MDE."""

    center: dict[str, float]
    range: dict[str, float]
    mde: float

    def __post_init__(self):
        for side in (self.center, self.range):
            for name, value in side.items():
                if name not in POINT_METRICS:
                    raise ValueError(f"unknown metric {name!r}")
                if value < 0:
                    raise ValueError(f"{name} must be nonnegative, got {value}")
        if self.mde < 0:
            raise ValueError(f"mde must be nonnegative, got {self.mde}")

    def to_dict(self) -> dict:
        return {"center": dict(self.center), "range": dict(self.range), "mde": self.mde}


def evaluate_interval(center, center_hat, rng, rng_hat) -> MetricTable:
    """Score paired center/range predictions with the full metric suite."""
    return MetricTable(
        center=point_metrics(center, center_hat),
        range=point_metrics(rng, rng_hat),
        mde=mde(center, center_hat, rng, rng_hat),
    )
