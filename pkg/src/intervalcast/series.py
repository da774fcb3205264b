"""Interval-valued series and their center/range representation.

An interval series stores per-timestamp lower/upper bounds; the
equivalent center/range form stores the midpoint and the half-width.
The two are exact affine images of each other:

    center = (lower + upper) / 2,   range = (upper - lower) / 2
    lower  = center - range,        upper = center + range

CSV ingestion supports a plain ``t,lower,upper`` schema and an OHLC
schema that maps the high/low columns of market data onto upper/lower.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import BoundViolation, NegativeRange, ParseError


def _as_vector(x, name):
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"{name} must be a nonempty 1-d sequence, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class IntervalSeries:
    """Interval-valued series as per-timestamp lower/upper bounds.

    Invariants: equal lengths >= 1 and lower[t] <= upper[t] for all t.
    """

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = _as_vector(self.lower, "lower")
        upper = _as_vector(self.upper, "upper")
        if lower.shape != upper.shape:
            raise ValueError(f"lower/upper lengths differ: {lower.size} vs {upper.size}")
        bad = np.nonzero(lower > upper)[0]
        if bad.size:
            t = int(bad[0])
            raise BoundViolation(f"lower > upper at index {t}: {lower[t]} > {upper[t]}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    def __len__(self):
        return self.lower.size


@dataclass(frozen=True)
class CenterRangeSeries:
    """Center/half-width representation of an interval series.

    Invariants: equal lengths and range[t] >= 0 for all t.
    """

    center: np.ndarray
    range: np.ndarray

    def __post_init__(self):
        center = _as_vector(self.center, "center")
        rng = _as_vector(self.range, "range")
        if center.shape != rng.shape:
            raise ValueError(f"center/range lengths differ: {center.size} vs {rng.size}")
        bad = np.nonzero(rng < 0)[0]
        if bad.size:
            t = int(bad[0])
            raise NegativeRange(f"range < 0 at index {t}: {rng[t]}")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "range", rng)

    def __len__(self):
        return self.center.size


def to_center_range(s: IntervalSeries) -> CenterRangeSeries:
    """Convert bounds to the center/half-width representation."""
    return CenterRangeSeries(center=(s.lower + s.upper) / 2.0, range=(s.upper - s.lower) / 2.0)


def from_center_range(s: CenterRangeSeries) -> IntervalSeries:
    """Recover bounds from center/half-width; inverse of to_center_range.

    Raises NegativeRange if any half-width is negative (CenterRangeSeries
    construction already enforces this; the check also guards raw inputs).
    """
    return IntervalSeries(lower=s.center - s.range, upper=s.center + s.range)


# CSV schemas: column names are matched case-insensitively and extra
# columns are ignored, so raw OHLC exports ingest without preprocessing.
_SCHEMAS = {
    "bounds": ("lower", "upper"),
    "ohlc": ("low", "high"),
}


def load_csv(path, schema: str = "bounds") -> IntervalSeries:
    """Read an interval series from a CSV file.

    ``bounds`` expects columns t,lower,upper; ``ohlc`` expects date,high,low
    (high -> upper, low -> lower).  Row order is preserved.  Lines starting
    with '#' are treated as comments.
    """
    if schema not in _SCHEMAS:
        raise ValueError(f"unknown schema {schema!r}; expected one of {sorted(_SCHEMAS)}")
    lo_col, hi_col = _SCHEMAS[schema]

    try:
        fh = open(path, newline="")
    except OSError as e:
        raise ParseError(f"cannot open {path}: {e}") from e
    with fh:
        rows = csv.reader(line for line in fh if not line.startswith("#"))
        try:
            header = next(rows)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        names = [h.strip().lower() for h in header]
        try:
            lo_idx = names.index(lo_col)
            hi_idx = names.index(hi_col)
        except ValueError:
            raise ParseError(
                f"{path}: header {names} lacks required columns "
                f"{lo_col!r}/{hi_col!r} for schema {schema!r}"
            ) from None

        lower, upper = [], []
        for i, row in enumerate(rows, start=1):
            if not row:
                continue
            try:
                lo = float(row[lo_idx])
                hi = float(row[hi_idx])
            except (ValueError, IndexError) as e:
                raise ParseError(f"{path}: row {i}: {e}") from e
            lower.append(lo)
            upper.append(hi)

    if not lower:
        raise ParseError(f"{path}: no data rows")
    lower = np.array(lower)
    upper = np.array(upper)
    bad = np.nonzero(lower > upper)[0]
    if bad.size:
        t = int(bad[0])
        raise BoundViolation(f"{path}: row {t + 1}: lower {lower[t]} > upper {upper[t]}")
    return IntervalSeries(lower=lower, upper=upper)


def write_csv(path, s: IntervalSeries, header_comments: dict | None = None) -> None:
    """Write a series as t,lower,upper with 17 significant digits.

    ``header_comments`` entries are emitted first as '# key=value' lines
    (provenance header); load_csv skips them.
    """
    with open(path, "w", newline="") as fh:
        for key, value in (header_comments or {}).items():
            fh.write(f"# {key}={value}\n")
        fh.write("t,lower,upper\n")
        for t in range(len(s)):
            fh.write(f"{t},{s.lower[t]:.17g},{s.upper[t]:.17g}\n")
