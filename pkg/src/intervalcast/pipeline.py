"""Experiment orchestration.

Three stages glued together here:

1. Candidate sweep: for every (depth, segmentation length) pair, build
   the 4-class imaging dataset from the center+range segments, train a
   classifier, and keep its per-epoch report.  The winner maximizes
   held-out accuracy; among candidates within one percentage point of
   the maximum the shallowest wins, with ties broken by smaller best
   epoch, then smaller segmentation length.
2. Feature datasets: every lag window is imaged with one encoding and
   pushed through the selected network's penultimate layer; feature
   vectors pair with next-step targets.
3. Raw-vs-extracted protocol: a chronological train/test split by
   target time index, every configured regressor fitted independently
   on raw lag windows and on each encoding's features, for center and
   range; the full metric suite lands in one report with the joint MDE
   computed from paired center/range predictions.

By default the classifier only ever sees segments drawn from the
training portion of the series (imaging the full series would leak the
test tail into the feature extractor); ``leak_free=False`` restores the
full-series variant.  Every training gets its seed from one fixed
mixing function of the master seed, so runs are reproducible cell by
cell and reports are byte-identical across reruns.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .dgp import DgpSpec, generate_dgp
from .errors import InsufficientData
from .fen import FenArchitecture, FenModel, TrainConfig, TrainReport, extract_features_batch, train
from .imaging import (
    ImagingMethod,
    apply_method,
    build_classification_dataset,
    normalize_unit,
    resize_bilinear,
)
from .lags import LagDataset, build_lag_dataset, segment, select_order
from .metrics import mde, point_metrics
from .regress import RegressorSpec, fit, predict
from .series import CenterRangeSeries, load_csv, to_center_range


def mix_seed(master: int, *parts) -> int:
    """Derive a child seed from the master seed and a cell tag.

    Fixed mixing function (sha256 of the repr), so cell seeds never
    depend on sweep order or on other cells.
    """
    digest = hashlib.sha256(repr((int(master),) + tuple(parts)).encode()).digest()
    return int.from_bytes(digest[:8], "little")


@dataclass(frozen=True)
class CsvSource:
    """A CSV file to ingest as the experiment series."""

    path: str
    schema: str = "bounds"


@dataclass(frozen=True)
class OrderConfig:
    """Lag orders: pinned values, or automatic selection when None."""

    center: int | None = None
    range: int | None = None
    max_lag: int = 20

    def __post_init__(self):
        if self.max_lag < 1:
            raise ValueError(f"max_lag must be >= 1, got {self.max_lag}")


def _default_regressors():
    return (RegressorSpec(kind="ridge"), RegressorSpec(kind="knn"), RegressorSpec(kind="mlp"))


def _default_methods():
    return tuple(ImagingMethod)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment run depends on."""

    data: DgpSpec | CsvSource = field(default_factory=lambda: DgpSpec(kind="c1", seed=7))
    orders: OrderConfig = field(default_factory=OrderConfig)
    segment_lengths: tuple[int, ...] = (30, 35, 40, 45, 50, 55)
    depths: tuple[int, ...] = (1, 2, 3)
    stage_widths: tuple[int, ...] = (8, 16)
    feature_dim: int = 64
    train: TrainConfig = field(default_factory=TrainConfig)
    imaging_methods: tuple[ImagingMethod, ...] = field(default_factory=_default_methods)
    mtf_bins: int = 8
    regressors: tuple[RegressorSpec, ...] = field(default_factory=_default_regressors)
    prediction_split: float = 0.8
    seed: int = 0
    leak_free: bool = True
    jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "segment_lengths", tuple(int(v) for v in self.segment_lengths))
        object.__setattr__(self, "depths", tuple(int(v) for v in self.depths))
        object.__setattr__(self, "stage_widths", tuple(int(v) for v in self.stage_widths))
        object.__setattr__(
            self, "imaging_methods",
            tuple(ImagingMethod.parse(m) for m in self.imaging_methods),
        )
        object.__setattr__(self, "regressors", tuple(self.regressors))
        if not self.segment_lengths or any(v < 2 for v in self.segment_lengths):
            raise ValueError(f"segment lengths must all be >= 2, got {self.segment_lengths}")
        if not self.depths or any(d < 1 for d in self.depths):
            raise ValueError(f"depths must all be >= 1, got {self.depths}")
        if not 0.0 < self.prediction_split < 1.0:
            raise ValueError(f"prediction_split must lie in (0, 1), got {self.prediction_split}")
        if not self.imaging_methods:
            raise ValueError("at least one imaging method is required")
        if not self.regressors:
            raise ValueError("at least one regressor is required")
        if self.jobs < 1:
            raise ValueError(f"jobs must be >= 1, got {self.jobs}")

    def architecture(self, depth: int) -> FenArchitecture:
        return FenArchitecture(
            blocks=depth, stage_widths=self.stage_widths, feature_dim=self.feature_dim
        )


def load_series(data) -> CenterRangeSeries:
    """Materialize the experiment series from a DGP spec or a CSV source."""
    if isinstance(data, DgpSpec):
        return generate_dgp(data)
    if isinstance(data, CsvSource):
        return to_center_range(load_csv(data.path, schema=data.schema))
    raise TypeError(f"unsupported data source {type(data).__name__}")


# --------------------------------------------------------------------
# stage 1: candidate sweep and selection
# --------------------------------------------------------------------

SELECTION_TOLERANCE = 0.01  # "comparable accuracy" = within one percentage point

# Published chosen combinations (depth index, segmentation length, best
# epoch) for the four benchmark datasets, for replication reference; the
# depth index counts the candidate family from shallowest = 1.
PAPER_FEN_CHOICES = {
    "c1": (1, 45, 10),
    "c2": (2, 45, 8),
    "c3": (3, 35, 10),
    "sp500": (3, 40, 8),
}


@dataclass(frozen=True)
class CandidateResult:
    depth: int
    delta: int
    report: TrainReport


@dataclass(frozen=True)
class FenSelection:
    """Per-candidate training reports and the chosen combination."""

    candidates: tuple[CandidateResult, ...]
    chosen_depth: int
    chosen_delta: int
    chosen_best_epoch: int

    def __post_init__(self):
        if not any(
            c.depth == self.chosen_depth and c.delta == self.chosen_delta
            for c in self.candidates
        ):
            raise ValueError("chosen candidate is not part of the sweep")

    def chosen(self) -> CandidateResult:
        for c in self.candidates:
            if c.depth == self.chosen_depth and c.delta == self.chosen_delta:
                return c
        raise AssertionError


def _select(candidates) -> CandidateResult:
    best_acc = max(c.report.best_accuracy for c in candidates)
    eligible = [c for c in candidates if c.report.best_accuracy >= best_acc - SELECTION_TOLERANCE]
    return min(eligible, key=lambda c: (c.depth, c.report.best_epoch, c.delta))


def _train_candidate(cfg: ExperimentConfig, series, n_fit, depth, delta):
    if n_fit // delta < 2:
        raise InsufficientData(
            f"only {n_fit // delta} segments of length {delta} in {n_fit} points; need >= 2"
        )
    segs_c = segment(series.center[:n_fit], delta, source="center")
    segs_r = segment(series.range[:n_fit], delta, source="range")
    dataset = build_classification_dataset(segs_c, segs_r, mtf_bins=cfg.mtf_bins)
    train_cfg = replace(cfg.train, seed=mix_seed(cfg.seed, "fen", depth, delta))
    return train(dataset, cfg.architecture(depth), train_cfg)


def _fit_length(cfg: ExperimentConfig, series) -> int:
    n = len(series)
    return int(cfg.prediction_split * n) if cfg.leak_free else n


def _sweep(cfg: ExperimentConfig, series):
    n_fit = _fit_length(cfg, series)
    grid = [(depth, delta) for depth in cfg.depths for delta in cfg.segment_lengths]

    def run_cell(cell):
        depth, delta = cell
        model, report = _train_candidate(cfg, series, n_fit, depth, delta)
        return cell, model, report

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(run_cell, grid))
    else:
        results = [run_cell(cell) for cell in grid]

    models = {cell: model for cell, model, _ in results}
    candidates = tuple(
        CandidateResult(depth=cell[0], delta=cell[1], report=report)
        for cell, _, report in results
    )
    chosen = _select(candidates)
    selection = FenSelection(
        candidates=candidates,
        chosen_depth=chosen.depth,
        chosen_delta=chosen.delta,
        chosen_best_epoch=chosen.report.best_epoch,
    )
    return selection, models[(chosen.depth, chosen.delta)]


def run_algorithm1(cfg: ExperimentConfig) -> FenSelection:
    """Sweep (depth, segmentation length) candidates and pick the network."""
    series = load_series(cfg.data)
    selection, _ = _sweep(cfg, series)
    return selection


# --------------------------------------------------------------------
# stage 2: feature datasets
# --------------------------------------------------------------------


@dataclass(frozen=True)
class FeatureDataset:
    """Extracted feature vectors paired with next-step targets."""

    features: np.ndarray  # (n, feature_dim)
    targets: np.ndarray   # (n,)
    order: int
    method: ImagingMethod
    source: str

    def __post_init__(self):
        if self.features.ndim != 2 or self.features.shape[0] != self.targets.size:
            raise ValueError(
                f"features shape {self.features.shape} vs {self.targets.size} targets"
            )


def _window_images(windows, method, mtf_bins, min_side):
    # quantile bins cannot exceed the window length; short windows are
    # imaged at their own side then upscaled to the network's minimum
    bins = min(mtf_bins, windows.shape[1])
    images = []
    for row in windows:
        img = apply_method(method, row, mtf_bins=bins)
        if img.n < min_side:
            img = resize_bilinear(img, min_side)
        images.append(normalize_unit(img))
    return images


def build_feature_datasets(
    model: FenModel,
    series: CenterRangeSeries,
    order_center: int,
    order_range: int,
    method: ImagingMethod,
    mtf_bins: int = 8,
) -> tuple[FeatureDataset, FeatureDataset]:
    """Image every lag window, extract features, pair with targets."""
    out = []
    for x, order, source in (
        (series.center, order_center, "center"),
        (series.range, order_range, "range"),
    ):
        lag = build_lag_dataset(x, order, source=source)
        images = _window_images(lag.windows, method, mtf_bins, model.architecture.min_side)
        features = extract_features_batch(model, images)
        out.append(
            FeatureDataset(
                features=features, targets=lag.targets, order=order,
                method=ImagingMethod.parse(method), source=source,
            )
        )
    return out[0], out[1]


# --------------------------------------------------------------------
# stage 3: raw-vs-extracted experiment
# --------------------------------------------------------------------


@dataclass(frozen=True)
class CellResult:
    """Metrics of one (regressor, representation, source) combination."""

    regressor: str
    method: str  # "raw" or an imaging method name
    source: str  # "center" or "range"
    metrics: dict | None = None
    error: str | None = None


@dataclass(frozen=True)
class MdeResult:
    regressor: str
    method: str
    value: float | None = None
    error: str | None = None


@dataclass(frozen=True)
class ExperimentReport:
    """Everything one run produced, ready for serialization."""

    meta: dict
    orders: dict
    fen_selection: FenSelection
    cells: tuple[CellResult, ...]
    mde: tuple[MdeResult, ...]

    def cell(self, regressor: str, method: str, source: str) -> CellResult:
        for c in self.cells:
            if (c.regressor, c.method, c.source) == (regressor, method, source):
                return c
        raise KeyError((regressor, method, source))

    def mde_entry(self, regressor: str, method: str) -> MdeResult:
        for m in self.mde:
            if (m.regressor, m.method) == (regressor, method):
                return m
        raise KeyError((regressor, method))


def _split_rows(order: int, t_split: int, total: int):
    """Row indices of the train/test targets for a dataset of lag order
    ``order``; row i holds the target at time index order + i."""
    first_test_row = t_split - order
    if first_test_row < 2:
        raise InsufficientData(
            f"split at {t_split} leaves {max(first_test_row, 0)} training rows for order {order}"
        )
    if first_test_row >= total:
        raise InsufficientData(f"split at {t_split} leaves no test rows for order {order}")
    return np.arange(first_test_row), np.arange(first_test_row, total)


def _evaluate_cell(spec: RegressorSpec, X, y, train_rows, test_rows):
    model = fit(spec, X[train_rows], y[train_rows])
    predictions = predict(model, X[test_rows])
    return predictions, y[test_rows]


def resolve_orders(cfg: ExperimentConfig, series: CenterRangeSeries) -> tuple[int, int]:
    """Pinned orders when configured, else the pacf significance rule."""
    a_c = select_order(series.center, cfg.orders.max_lag, pin=cfg.orders.center)
    a_r = select_order(series.range, cfg.orders.max_lag, pin=cfg.orders.range)
    return a_c, a_r


def run_experiment(cfg: ExperimentConfig):
    """Run the full protocol; returns (report, fen_model).

    Cells that fail (e.g. a zero-denominator metric on pathological
    data) are recorded with their error instead of aborting the grid.
    """
    series = load_series(cfg.data)
    n = len(series)
    t_split = int(cfg.prediction_split * n)
    a_c, a_r = resolve_orders(cfg, series)

    selection, fen_model = _sweep(cfg, series)

    # representation name -> {source: (X, y, order)}
    datasets: dict[str, dict] = {}
    raw_c = build_lag_dataset(series.center, a_c, source="center")
    raw_r = build_lag_dataset(series.range, a_r, source="range")
    datasets["raw"] = {
        "center": (raw_c.windows, raw_c.targets, a_c),
        "range": (raw_r.windows, raw_r.targets, a_r),
    }
    for method in cfg.imaging_methods:
        fc, fr = build_feature_datasets(
            fen_model, series, a_c, a_r, method, mtf_bins=cfg.mtf_bins
        )
        datasets[method.name.lower()] = {
            "center": (fc.features, fc.targets, a_c),
            "range": (fr.features, fr.targets, a_r),
        }

    cells = []
    mde_entries = []
    method_names = ["raw"] + [m.name.lower() for m in cfg.imaging_methods]
    for spec in cfg.regressors:
        for method_name in method_names:
            predictions = {}
            for source in ("center", "range"):
                X, y, order = datasets[method_name][source]
                try:
                    train_rows, test_rows = _split_rows(order, t_split, y.size)
                    yhat, ytrue = _evaluate_cell(spec, X, y, train_rows, test_rows)
                    predictions[source] = (ytrue, yhat)
                    cells.append(
                        CellResult(
                            regressor=spec.name, method=method_name, source=source,
                            metrics=point_metrics(ytrue, yhat),
                        )
                    )
                except Exception as e:  # record, keep the grid going
                    cells.append(
                        CellResult(
                            regressor=spec.name, method=method_name, source=source,
                            error=f"{type(e).__name__}: {e}",
                        )
                    )
            if len(predictions) == 2:
                (c_true, c_hat) = predictions["center"]
                (r_true, r_hat) = predictions["range"]
                mde_entries.append(
                    MdeResult(
                        regressor=spec.name, method=method_name,
                        value=mde(c_true, c_hat, r_true, r_hat),
                    )
                )
            else:
                mde_entries.append(
                    MdeResult(
                        regressor=spec.name, method=method_name,
                        error="missing center or range predictions",
                    )
                )

    from .config import config_hash, config_to_dict  # local import to avoid a cycle

    report = ExperimentReport(
        meta={
            "seed": cfg.seed,
            "config_hash": config_hash(cfg),
            "version": __version__,
            "config": config_to_dict(cfg),
        },
        orders={"center": a_c, "range": a_r},
        fen_selection=selection,
        cells=tuple(cells),
        mde=tuple(mde_entries),
    )
    return report, fen_model


# --------------------------------------------------------------------
# report serialization
# --------------------------------------------------------------------


def selection_to_dict(selection: FenSelection) -> dict:
    return {
        "candidates": [
            {
                "depth": c.depth,
                "delta": c.delta,
                "train_loss": list(c.report.train_loss),
                "test_accuracy": list(c.report.test_accuracy),
                "best_epoch": c.report.best_epoch,
                "best_accuracy": c.report.best_accuracy,
            }
            for c in selection.candidates
        ],
        "chosen": {
            "depth": selection.chosen_depth,
            "delta": selection.chosen_delta,
            "best_epoch": selection.chosen_best_epoch,
        },
    }


def report_to_dict(report: ExperimentReport) -> dict:
    return {
        "meta": report.meta,
        "orders": report.orders,
        "fen_selection": selection_to_dict(report.fen_selection),
        "cells": [
            {
                "regressor": c.regressor,
                "method": c.method,
                "source": c.source,
                "metrics": c.metrics,
                "error": c.error,
            }
            for c in report.cells
        ],
        "mde": [
            {"regressor": m.regressor, "method": m.method, "value": m.value, "error": m.error}
            for m in report.mde
        ],
    }


def report_rows(report: ExperimentReport):
    """Flat rows (one per regressor x representation) for the CSV report."""
    header = [
        "regressor", "method",
        "mse_center", "mse_range", "mae_center", "mae_range",
        "mape_center", "mape_range", "smape_center", "smape_range",
        "mde", "error",
    ]
    rows = [header]
    seen = []
    for c in report.cells:
        key = (c.regressor, c.method)
        if key not in seen:
            seen.append(key)
    for regressor, method in seen:
        center = report.cell(regressor, method, "center")
        rng = report.cell(regressor, method, "range")
        entry = report.mde_entry(regressor, method)
        errors = "; ".join(
            e for e in (center.error, rng.error, entry.error) if e
        )

        def metric(cell, name):
            return f"{cell.metrics[name]:.17g}" if cell.metrics else ""

        rows.append([
            regressor, method,
            metric(center, "mse"), metric(rng, "mse"),
            metric(center, "mae"), metric(rng, "mae"),
            metric(center, "mape"), metric(rng, "mape"),
            metric(center, "smape"), metric(rng, "smape"),
            f"{entry.value:.17g}" if entry.value is not None else "",
            errors,
        ])
    return rows
