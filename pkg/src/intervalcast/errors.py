"""Exception taxonomy shared across the package.

Every domain error derives from IntervalcastError (itself a ValueError),
so callers can catch broadly or by specific failure mode.
"""


class IntervalcastError(ValueError):
    """Base class for all domain errors raised by this package."""


class NegativeRange(IntervalcastError):
    """A range (half-width) value is negative."""


class BoundViolation(IntervalcastError):
    """An interval's lower bound exceeds its upper bound."""


class LogDomain(IntervalcastError):
    """A log-autoregressive iterate left the domain of the logarithm."""


class DegenerateSeries(IntervalcastError):
    """A series has zero variance (or is otherwise too degenerate to analyze)."""


class OrderTooLarge(IntervalcastError):
    """A lag order is >= the series length."""


class SegmentTooLong(IntervalcastError):
    """A segmentation length exceeds the series length."""


class ParseError(IntervalcastError):
    """A CSV file could not be parsed; message carries row index and reason."""


class BinCountTooLarge(IntervalcastError):
    """A quantile bin count exceeds the window length."""


class ShapeMismatch(IntervalcastError):
    """An array's shape is incompatible with the operation."""


class InsufficientData(IntervalcastError):
    """Not enough data to run the requested procedure."""


class VersionMismatch(IntervalcastError):
    """A serialized model's version is not supported."""


class CorruptModel(IntervalcastError):
    """A serialized model file is truncated or structurally invalid."""


class DimensionMismatch(IntervalcastError):
    """Feature-matrix / target dimensions disagree."""


class SingularSystem(IntervalcastError):
    """A linear solve produced no finite solution."""


class ZeroDenominator(IntervalcastError):
    """A metric denominator is zero; message identifies the offending index."""


class LengthMismatch(IntervalcastError):
    """Sequences that must share a length do not."""
