"""Lag-order analysis and supervised dataset construction.

Provides the sample autocorrelation function (biased 1/T estimator, so
the autocovariance sequence stays positive semidefinite), partial
autocorrelations via the Durbin-Levinson recursion, a significance-band
order-selection rule, sliding lag-window datasets, and disjoint
segmentation of a series.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSeries, OrderTooLarge, SegmentTooLong

# Reference lag orders (center, range) for the four named benchmark
# datasets; used to replicate published experiments without re-deriving
# orders from the correlograms.
PINNED_ORDERS = {
    "sp500": (35, 35),
    "c1": (5, 3),
    "c2": (25, 5),
    "c3": (5, 5),
}


def acf(x, max_lag: int) -> np.ndarray:
    """Sample autocorrelations r(0..max_lag); r(0) == 1.

    Biased estimator: lag-k autocovariance divides by T, not T-k.
    Raises DegenerateSeries when the sample variance is zero.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if max_lag < 1:
        raise ValueError(f"max_lag must be >= 1, got {max_lag}")
    if n <= max_lag:
        raise ValueError(f"series length {n} must exceed max_lag {max_lag}")
    xc = x - x.mean()
    c0 = float(np.dot(xc, xc))
    if c0 == 0.0:
        raise DegenerateSeries("series has zero sample variance")
    r = np.empty(max_lag + 1)
    r[0] = 1.0
    for k in range(1, max_lag + 1):
        r[k] = float(np.dot(xc[:-k], xc[k:])) / c0
    return r


def pacf(x, max_lag: int) -> np.ndarray:
    """Partial autocorrelations p(0..max_lag) with p(0) == 1.

    Computed by the Durbin-Levinson recursion on the biased acf, so
    p(1) == r(1) exactly.
    """
    r = acf(x, max_lag)
    p = np.empty(max_lag + 1)
    p[0] = 1.0
    phi = np.zeros(max_lag + 1)
    prev = np.zeros(max_lag + 1)
    phi[1] = r[1]
    p[1] = r[1]
    v = 1.0 - r[1] * r[1]
    for k in range(2, max_lag + 1):
        if v <= 0.0:
            raise DegenerateSeries(
                f"prediction variance vanished at lag {k}; series too regular for pacf"
            )
        prev[1:k] = phi[1:k]
        num = r[k] - float(np.dot(prev[1:k], r[k - 1:0:-1]))
        phi_kk = num / v
        phi[1:k] = prev[1:k] - phi_kk * prev[k - 1:0:-1]
        phi[k] = phi_kk
        p[k] = phi_kk
        v *= 1.0 - phi_kk * phi_kk
    return p


def select_order(x, max_lag: int, pin: int | None = None) -> int:
    """Pick a lag order from the pacf significance band.

    Returns the largest lag k <= max_lag with |pacf(k)| > 1.96/sqrt(T),
    or 1 when no lag is significant.  ``pin`` bypasses the rule entirely
    (manual override, e.g. the PINNED_ORDERS replication values).
    """
    if pin is not None:
        if pin < 1:
            raise ValueError(f"pinned order must be >= 1, got {pin}")
        return int(pin)
    x = np.asarray(x, dtype=float)
    p = pacf(x, max_lag)
    band = 1.96 / np.sqrt(x.size)
    significant = np.nonzero(np.abs(p[1:]) > band)[0] + 1
    return int(significant[-1]) if significant.size else 1


@dataclass(frozen=True)
class LagDataset:
    """Sliding lag windows paired with next-step targets.

    windows[j] holds the ``order`` consecutive values immediately
    preceding targets[j], most recent last.
    """

    order: int
    windows: np.ndarray  # (n, order)
    targets: np.ndarray  # (n,)
    source: str = "center"

    def __post_init__(self):
        if self.windows.shape != (self.targets.size, self.order):
            raise ValueError(
                f"windows shape {self.windows.shape} inconsistent with "
                f"{self.targets.size} targets of order {self.order}"
            )


def build_lag_dataset(x, order: int, source: str = "center") -> LagDataset:
    """Build the (window, target) pairs for one-step-ahead prediction.

    For a series of length T there are exactly T - order pairs; the
    window for target x[j] is x[j-order:j].
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    if order >= n:
        raise OrderTooLarge(f"order {order} >= series length {n}")
    count = n - order
    windows = np.empty((count, order))
    for j in range(count):
        windows[j] = x[j:j + order]
    return LagDataset(order=order, windows=windows, targets=x[order:].copy(), source=source)


@dataclass(frozen=True)
class SegmentSet:
    """Disjoint consecutive segments of equal length."""

    delta: int
    segments: np.ndarray  # (count, delta)
    source: str = "center"

    def __post_init__(self):
        if self.segments.ndim != 2 or self.segments.shape[1] != self.delta:
            raise ValueError(
                f"segments shape {self.segments.shape} inconsistent with delta {self.delta}"
            )

    def __len__(self):
        return self.segments.shape[0]


def segment(x, delta: int, source: str = "center") -> SegmentSet:
    """Cut a series into floor(T/delta) disjoint consecutive segments.

    The trailing remainder (T mod delta values) is dropped.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if delta < 2:
        raise ValueError(f"segment length must be >= 2, got {delta}")
    if delta > n:
        raise SegmentTooLong(f"segment length {delta} > series length {n}")
    count = n // delta
    segments = x[:count * delta].reshape(count, delta).copy()
    return SegmentSet(delta=delta, segments=segments, source=source)
