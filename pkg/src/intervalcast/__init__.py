"""Interval-valued time-series forecasting via imaging and feature extraction.

The library represents an interval series by its center and range,
images lag windows with four encodings (recurrence, Gramian angular
summation/difference, Markov transition), trains a small residual CNN
on the resulting 4-class dataset, and regresses next-step targets on
the network's penultimate features, comparing against raw-lag
baselines under a shared metric suite.
"""

__version__ = "0.1.0"

from .dgp import DgpSpec, generate_dgp
from .errors import IntervalcastError
from .fen import FenArchitecture, FenModel, TrainConfig, TrainReport
from .imaging import GrayImage, ImagingMethod, LabeledImageSet
from .lags import LagDataset, SegmentSet, acf, build_lag_dataset, pacf, segment, select_order
from .metrics import MetricTable, evaluate_interval, mae, mape, mde, mse, smape
from .pipeline import (
    CsvSource,
    ExperimentConfig,
    ExperimentReport,
    FeatureDataset,
    FenSelection,
    OrderConfig,
    build_feature_datasets,
    run_algorithm1,
    run_experiment,
)
from .regress import FittedRegressor, RegressorSpec, fit, predict
from .series import (
    CenterRangeSeries,
    IntervalSeries,
    from_center_range,
    load_csv,
    to_center_range,
    write_csv,
)

__all__ = [
    "__version__",
    "IntervalcastError",
    "IntervalSeries", "CenterRangeSeries", "to_center_range", "from_center_range",
    "load_csv", "write_csv",
    "DgpSpec", "generate_dgp",
    "acf", "pacf", "select_order", "build_lag_dataset", "segment",
    "LagDataset", "SegmentSet",
    "GrayImage", "ImagingMethod", "LabeledImageSet",
    "FenArchitecture", "FenModel", "TrainConfig", "TrainReport",
    "RegressorSpec", "FittedRegressor", "fit", "predict",
    "MetricTable", "evaluate_interval", "mse", "mae", "mape", "smape", "mde",
    "ExperimentConfig", "OrderConfig", "CsvSource", "ExperimentReport",
    "FenSelection", "FeatureDataset",
    "run_algorithm1", "run_experiment", "build_feature_datasets",
]
