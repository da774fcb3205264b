"""JSON experiment configuration: parsing, defaults, canonical hashing.

Every field has a default, so ``{}`` is a valid document; unknown keys
are rejected at every level to catch typos before any work starts.
"""

from __future__ import annotations

import hashlib
import json

from .dgp import DgpSpec
from .fen import TrainConfig
from .pipeline import CsvSource, ExperimentConfig, OrderConfig
from .regress import RegressorSpec


class ConfigError(ValueError):
    """A configuration document is invalid."""


def _check_keys(section: dict, allowed, where: str):
    if not isinstance(section, dict):
        raise ConfigError(f"{where} must be an object, got {type(section).__name__}")
    unknown = sorted(set(section) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {unknown}")


def _parse_data(section):
    if "csv" in section:
        _check_keys(section, {"csv", "schema"}, "data")
        return CsvSource(path=section["csv"], schema=section.get("schema", "bounds"))
    _check_keys(section, {"dgp", "length", "seed", "noise_std", "burn_in", "c3_log_base"}, "data")
    return DgpSpec(
        kind=section.get("dgp", "c1"),
        length=section.get("length", 1500),
        seed=section.get("seed", 7),
        noise_std=section.get("noise_std", 1.0),
        burn_in=section.get("burn_in", 0),
        c3_log_base=section.get("c3_log_base", "e"),
    )


def _parse_orders(section):
    _check_keys(section, {"center", "range", "max_lag"}, "orders")
    return OrderConfig(
        center=section.get("center"),
        range=section.get("range"),
        max_lag=section.get("max_lag", 20),
    )


def _parse_train(section):
    _check_keys(
        section,
        {"epochs", "batch_size", "learning_rate", "momentum", "optimizer", "split"},
        "train",
    )
    return TrainConfig(
        epochs=section.get("epochs", 10),
        batch_size=section.get("batch_size", 32),
        learning_rate=section.get("learning_rate", 0.01),
        momentum=section.get("momentum", 0.9),
        optimizer=section.get("optimizer", "sgd-momentum"),
        split=section.get("split", 0.8),
    )


def _parse_regressor(section, index):
    where = f"regressors[{index}]"
    _check_keys(
        section, {"kind", "lam", "k", "hidden", "epochs", "learning_rate", "seed"}, where
    )
    if "kind" not in section:
        raise ConfigError(f"{where} needs a 'kind'")
    defaults = RegressorSpec(kind=section["kind"])
    return RegressorSpec(
        kind=section["kind"],
        lam=section.get("lam", defaults.lam),
        k=section.get("k", defaults.k),
        hidden=section.get("hidden", defaults.hidden),
        epochs=section.get("epochs", defaults.epochs),
        learning_rate=section.get("learning_rate", defaults.learning_rate),
        seed=section.get("seed", defaults.seed),
    )


_TOP_KEYS = {
    "data", "orders", "segment_lengths", "depths", "stage_widths", "feature_dim",
    "train", "imaging_methods", "mtf_bins", "regressors", "prediction_split",
    "seed", "leak_free", "jobs",
}


def config_from_dict(doc: dict) -> ExperimentConfig:
    """Build an ExperimentConfig from a JSON document, applying defaults."""
    _check_keys(doc, _TOP_KEYS, "config")
    defaults = ExperimentConfig()
    try:
        return ExperimentConfig(
            data=_parse_data(doc.get("data", {})),
            orders=_parse_orders(doc.get("orders", {})),
            segment_lengths=tuple(doc.get("segment_lengths", defaults.segment_lengths)),
            depths=tuple(doc.get("depths", defaults.depths)),
            stage_widths=tuple(doc.get("stage_widths", defaults.stage_widths)),
            feature_dim=doc.get("feature_dim", defaults.feature_dim),
            train=_parse_train(doc.get("train", {})),
            imaging_methods=tuple(doc.get("imaging_methods", ["rp", "gasf", "gadf", "mtf"])),
            mtf_bins=doc.get("mtf_bins", defaults.mtf_bins),
            regressors=tuple(
                _parse_regressor(r, i) for i, r in enumerate(doc["regressors"])
            ) if "regressors" in doc else defaults.regressors,
            prediction_split=doc.get("prediction_split", defaults.prediction_split),
            seed=doc.get("seed", defaults.seed),
            leak_free=doc.get("leak_free", defaults.leak_free),
            jobs=doc.get("jobs", defaults.jobs),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e)) from e


def config_to_dict(cfg: ExperimentConfig) -> dict:
    """Canonical JSON form of a config (inverse of config_from_dict)."""
    if isinstance(cfg.data, DgpSpec):
        data = {
            "dgp": cfg.data.kind,
            "length": cfg.data.length,
            "seed": cfg.data.seed,
            "noise_std": cfg.data.noise_std,
            "burn_in": cfg.data.burn_in,
            "c3_log_base": cfg.data.c3_log_base,
        }
    else:
        data = {"csv": cfg.data.path, "schema": cfg.data.schema}
    return {
        "data": data,
        "orders": {
            "center": cfg.orders.center,
            "range": cfg.orders.range,
            "max_lag": cfg.orders.max_lag,
        },
        "segment_lengths": list(cfg.segment_lengths),
        "depths": list(cfg.depths),
        "stage_widths": list(cfg.stage_widths),
        "feature_dim": cfg.feature_dim,
        "train": {
            "epochs": cfg.train.epochs,
            "batch_size": cfg.train.batch_size,
            "learning_rate": cfg.train.learning_rate,
            "momentum": cfg.train.momentum,
            "optimizer": cfg.train.optimizer,
            "split": cfg.train.split,
        },
        "imaging_methods": [m.name.lower() for m in cfg.imaging_methods],
        "mtf_bins": cfg.mtf_bins,
        "regressors": [
            {
                "kind": r.kind,
                "lam": r.lam,
                "k": r.k,
                "hidden": r.hidden,
                "epochs": r.epochs,
                "learning_rate": r.learning_rate,
                "seed": r.seed,
            }
            for r in cfg.regressors
        ],
        "prediction_split": cfg.prediction_split,
        "seed": cfg.seed,
        "leak_free": cfg.leak_free,
        "jobs": cfg.jobs,
    }


def config_hash(cfg: ExperimentConfig) -> str:
    """sha256 of the canonical JSON form."""
    canonical = json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def load_config(path) -> ExperimentConfig:
    """Parse and validate a JSON config file."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON: {e}") from e
    return config_from_dict(doc)
