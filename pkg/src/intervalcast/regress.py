"""Interchangeable regressors for the prediction stage.

Three desk-scale learners behind one fit/predict interface:

- ridge: normal equations (X'X + lam*I) b = X'y on standardized
  features with an unpenalized intercept (the target is centered, so
  lam -> inf drives predictions to mean(y)).  lam = 0 falls back to the
  minimum-norm least-squares solution, which interpolates whenever the
  system is consistent.
- knn: k-nearest-neighbour mean on standardized features with stable
  index tie-breaking.
- mlp: single hidden tanh layer trained by full-batch gradient descent,
  deterministic by seed; the output bias starts at mean(y).

Inputs are standardized per feature with training-split statistics;
targets stay in original units.  All training reductions are
order-independent (see _reductions), so permuting training rows leaves
fitted parameters and predictions bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._reductions import stable_mean, stable_sum
from .errors import DegenerateSeries, DimensionMismatch, SingularSystem

REGRESSOR_KINDS = ("ridge", "knn", "mlp")


@dataclass(frozen=True)
class RegressorSpec:
    """Which learner to fit and its hyperparameters."""

    kind: str
    lam: float = 1.0          # ridge
    k: int = 5                # knn
    hidden: int = 16          # mlp
    epochs: int = 300         # mlp
    learning_rate: float = 0.05  # mlp
    seed: int = 0             # mlp

    def __post_init__(self):
        if self.kind not in REGRESSOR_KINDS:
            raise ValueError(f"unknown regressor kind {self.kind!r}; expected {REGRESSOR_KINDS}")
        if self.kind == "ridge" and self.lam < 0:
            raise ValueError(f"ridge lam must be >= 0, got {self.lam}")
        if self.kind == "knn" and self.k < 1:
            raise ValueError(f"knn k must be >= 1, got {self.k}")
        if self.kind == "mlp":
            if self.hidden < 1 or self.epochs < 1 or self.learning_rate <= 0:
                raise ValueError("mlp needs hidden >= 1, epochs >= 1, learning_rate > 0")

    @property
    def name(self) -> str:
        return self.kind


@dataclass(frozen=True)
class FittedRegressor:
    """Frozen learner state; predict is a pure function of it."""

    spec: RegressorSpec
    feature_mean: np.ndarray
    feature_std: np.ndarray
    params: dict = field(default_factory=dict)

    @property
    def n_features(self) -> int:
        return self.feature_mean.size


def _validate_xy(X, y):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2:
        raise DimensionMismatch(f"X must be 2-d, got shape {X.shape}")
    if y.ndim != 1 or y.size != X.shape[0]:
        raise DimensionMismatch(f"{X.shape[0]} rows of X but {y.shape} targets")
    if X.shape[0] < 2:
        raise DimensionMismatch(f"need >= 2 training rows, got {X.shape[0]}")
    return X, y


def _standardize_stats(X):
    mean = stable_mean(X, axis=0)
    std = np.sqrt(stable_mean((X - mean) ** 2, axis=0))
    std = np.where(std == 0.0, 1.0, std)
    return mean, std


def _stable_gram(Z):
    """Z'Z with each entry an order-independent sum over rows."""
    p = Z.shape[1]
    gram = np.empty((p, p))
    for j in range(p):
        gram[:, j] = stable_sum(Z * Z[:, j:j + 1], axis=0)
    return gram


def fit(spec: RegressorSpec, X, y) -> FittedRegressor:
    """Fit one regressor on (X, y); deterministic and row-order invariant."""
    X, y = _validate_xy(X, y)
    mean, std = _standardize_stats(X)
    Z = (X - mean) / std

    if spec.kind == "ridge":
        intercept = float(stable_mean(y))
        rhs = stable_sum(Z * (y - intercept)[:, None], axis=0)
        gram = _stable_gram(Z)
        if spec.lam > 0:
            beta = np.linalg.solve(gram + spec.lam * np.eye(Z.shape[1]), rhs)
        else:
            beta = np.linalg.lstsq(gram, rhs, rcond=None)[0]
        if not np.all(np.isfinite(beta)):
            raise SingularSystem("ridge solve produced non-finite coefficients")
        params = {"beta": beta, "intercept": intercept}

    elif spec.kind == "knn":
        if spec.k > Z.shape[0]:
            raise DimensionMismatch(f"k={spec.k} exceeds {Z.shape[0]} training rows")
        params = {"train_z": Z.copy(), "train_y": y.copy()}

    else:  # mlp
        if float(np.max(y)) == float(np.min(y)):
            raise DegenerateSeries("mlp target is constant; nothing to fit")
        params = _fit_mlp(spec, Z, y)

    return FittedRegressor(spec=spec, feature_mean=mean, feature_std=std, params=params)


def predict(model: FittedRegressor, X) -> np.ndarray:
    """Predictions for each row of X, in original target units."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DimensionMismatch(f"X must be 2-d, got shape {X.shape}")
    if X.shape[0] == 0:
        return np.zeros(0)
    if X.shape[1] != model.n_features:
        raise DimensionMismatch(
            f"X has width {X.shape[1]}, model was fitted on {model.n_features}"
        )
    Z = (X - model.feature_mean) / model.feature_std
    spec = model.spec

    if spec.kind == "ridge":
        return model.params["intercept"] + Z @ model.params["beta"]

    if spec.kind == "knn":
        idx = neighbor_indices(model, X)
        selected = model.params["train_y"][idx]
        # sort the selected targets so the mean is row-order invariant
        return np.sort(selected, axis=1).sum(axis=1) / spec.k

    p = model.params
    hidden = np.tanh(Z @ p["w1"] + p["b1"])
    return hidden @ p["w2"] + p["b2"]


def neighbor_indices(model: FittedRegressor, X) -> np.ndarray:
    """Training-row indices of the k nearest neighbours of each query row.

    Ties in distance break by training index (stable sort), so results
    are deterministic.
    """
    if model.spec.kind != "knn":
        raise ValueError("neighbor_indices is only defined for knn models")
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise DimensionMismatch(f"X shape {X.shape} incompatible with {model.n_features} features")
    Z = (X - model.feature_mean) / model.feature_std
    train = model.params["train_z"]
    d2 = (Z ** 2).sum(axis=1)[:, None] + (train ** 2).sum(axis=1)[None, :] - 2.0 * Z @ train.T
    return np.argsort(d2, axis=1, kind="stable")[:, :model.spec.k]


def mlp_loss_and_grad(w1, b1, w2, b2, Z, y):
    """Half mean-squared-error of the hidden-layer net and its gradients.

    Gradients accumulate over samples with order-independent sums, so a
    full-batch descent step is invariant to training-row permutation.
    """
    n = Z.shape[0]
    hidden = np.tanh(Z @ w1 + b1)
    pred = hidden @ w2 + b2
    err = pred - y
    loss = float(stable_sum(err ** 2)) / (2.0 * n)

    dpred = err / n
    dw2 = stable_sum(hidden * dpred[:, None], axis=0)
    db2 = float(stable_sum(dpred))
    dhidden = dpred[:, None] * w2[None, :]
    dpre = dhidden * (1.0 - hidden ** 2)
    dw1 = stable_sum(Z[:, :, None] * dpre[:, None, :], axis=0)
    db1 = stable_sum(dpre, axis=0)
    return loss, (dw1, db1, dw2, db2)


def _fit_mlp(spec: RegressorSpec, Z, y):
    rng = np.random.default_rng(spec.seed)
    p = Z.shape[1]
    w1 = rng.normal(0.0, 1.0 / np.sqrt(p), (p, spec.hidden))
    b1 = np.zeros(spec.hidden)
    w2 = rng.normal(0.0, 1.0 / np.sqrt(spec.hidden), spec.hidden)
    b2 = float(stable_mean(y))
    for _ in range(spec.epochs):
        _, (dw1, db1, dw2, db2) = mlp_loss_and_grad(w1, b1, w2, b2, Z, y)
        w1 -= spec.learning_rate * dw1
        b1 -= spec.learning_rate * db1
        w2 -= spec.learning_rate * dw2
        b2 -= spec.learning_rate * db2
    return {"w1": w1, "b1": b1, "w2": w2, "b2": b2}
