"""Residual convolutional classifier and penultimate-feature extraction.

The network is a small residual CNN over single-channel images:

    conv stem -> residual stages -> global average pooling
    -> affine+relu projection to the feature vector (penultimate layer)
    -> affine head -> 4 logits

Each residual block is conv-bn-relu-conv-bn plus an identity skip, relu
after the add; the first block of every stage after the first halves
the spatial size (stride 2) and projects channels with a 1x1 conv on
the skip.  Global average pooling makes the net size-agnostic, so lag
windows imaged at a different side than the training segments still
extract features.  Depth is a knob (blocks per stage) standing in for a
family of progressively deeper backbones.

Everything is plain float64 numpy with hand-derived adjoints; training
is a pure function of (dataset, architecture, config): the same seed
reproduces bit-identical weight trajectories.  The head is
zero-initialized, so an untrained model predicts the uniform
distribution (cross-entropy exactly ln 4).
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field

import numpy as np

from . import _layers as L
from ._reductions import exact_sum
from .errors import CorruptModel, InsufficientData, ShapeMismatch, VersionMismatch
from .imaging import GrayImage, LabeledImageSet

MODEL_FORMAT_VERSION = 1
BN_MOMENTUM = 0.1


@dataclass(frozen=True)
class FenArchitecture:
    """Shape of the classifier family.

    blocks: residual blocks per stage (the depth knob).
    stage_widths: channel count of each stage.
    feature_dim: length of the penultimate feature vector.
    classes: output classes (fixed at 4, one per imaging method).
    min_side: smallest accepted input side.
    """

    blocks: int = 2
    stage_widths: tuple[int, ...] = (8, 16)
    feature_dim: int = 64
    classes: int = 4
    min_side: int = 8

    def __post_init__(self):
        object.__setattr__(self, "stage_widths", tuple(int(w) for w in self.stage_widths))
        if self.blocks < 1:
            raise ValueError(f"blocks must be >= 1, got {self.blocks}")
        if self.feature_dim < 8:
            raise ValueError(f"feature_dim must be >= 8, got {self.feature_dim}")
        if self.classes != 4:
            raise ValueError(f"classes is fixed at 4, got {self.classes}")
        if not self.stage_widths or any(w < 1 for w in self.stage_widths):
            raise ValueError(f"stage_widths must be positive, got {self.stage_widths}")
        if self.min_side < 4:
            raise ValueError(f"min_side must be >= 4, got {self.min_side}")

    def param_shapes(self) -> dict[str, tuple[int, ...]]:
        """Canonical parameter names and shapes, in initialization order."""
        shapes: dict[str, tuple[int, ...]] = {}
        w0 = self.stage_widths[0]
        shapes["stem.conv.w"] = (w0, 1, 3, 3)
        shapes["stem.bn.gamma"] = (w0,)
        shapes["stem.bn.beta"] = (w0,)
        c_in = w0
        for si, width in enumerate(self.stage_widths):
            for bi in range(self.blocks):
                p = f"s{si}.b{bi}"
                shapes[f"{p}.conv1.w"] = (width, c_in, 3, 3)
                shapes[f"{p}.bn1.gamma"] = (width,)
                shapes[f"{p}.bn1.beta"] = (width,)
                shapes[f"{p}.conv2.w"] = (width, width, 3, 3)
                shapes[f"{p}.bn2.gamma"] = (width,)
                shapes[f"{p}.bn2.beta"] = (width,)
                if self._downsamples(si, bi):
                    shapes[f"{p}.proj.w"] = (width, c_in, 1, 1)
                    shapes[f"{p}.projbn.gamma"] = (width,)
                    shapes[f"{p}.projbn.beta"] = (width,)
                c_in = width
        shapes["neck.w"] = (self.stage_widths[-1], self.feature_dim)
        shapes["neck.b"] = (self.feature_dim,)
        shapes["head.w"] = (self.feature_dim, self.classes)
        shapes["head.b"] = (self.classes,)
        return shapes

    def state_shapes(self) -> dict[str, tuple[int, ...]]:
        """Running-statistics names and shapes (one mean/var pair per bn)."""
        shapes: dict[str, tuple[int, ...]] = {}
        for name, shape in self.param_shapes().items():
            if name.endswith(".gamma"):
                bn = name[:-len(".gamma")]
                shapes[f"{bn}.mean"] = shape
                shapes[f"{bn}.var"] = shape
        return shapes

    def _downsamples(self, stage_index: int, block_index: int) -> bool:
        return stage_index > 0 and block_index == 0


@dataclass
class FenModel:
    """Architecture plus named weights and batch-norm running statistics."""

    architecture: FenArchitecture
    params: dict[str, np.ndarray]
    state: dict[str, np.ndarray]
    trained_epochs: int = 0
    rng_seed: int = 0

    def __post_init__(self):
        expected = self.architecture.param_shapes()
        if set(self.params) != set(expected):
            raise ShapeMismatch("parameter names do not match the architecture")
        for name, shape in expected.items():
            if self.params[name].shape != shape:
                raise ShapeMismatch(
                    f"{name}: shape {self.params[name].shape}, architecture wants {shape}"
                )
        expected_state = self.architecture.state_shapes()
        if set(self.state) != set(expected_state):
            raise ShapeMismatch("state names do not match the architecture")
        for name, shape in expected_state.items():
            if self.state[name].shape != shape:
                raise ShapeMismatch(
                    f"{name}: shape {self.state[name].shape}, architecture wants {shape}"
                )

    def copy(self) -> "FenModel":
        return FenModel(
            architecture=self.architecture,
            params={k: v.copy() for k, v in self.params.items()},
            state={k: v.copy() for k, v in self.state.items()},
            trained_epochs=self.trained_epochs,
            rng_seed=self.rng_seed,
        )


def init_model(arch: FenArchitecture, seed: int = 0) -> FenModel:
    """He-initialized convolutions and projection; zero classifier head."""
    rng = np.random.default_rng(seed)
    params: dict[str, np.ndarray] = {}
    for name, shape in arch.param_shapes().items():
        if name.endswith(".gamma"):
            params[name] = np.ones(shape)
        elif name.endswith((".beta", "head.w", "head.b", "neck.b")):
            params[name] = np.zeros(shape)
        elif name.endswith(".w"):
            fan_in = int(np.prod(shape[1:])) if len(shape) == 4 else shape[0]
            params[name] = rng.normal(0.0, np.sqrt(2.0 / fan_in), shape)
        else:
            raise AssertionError(name)
    state = {
        name: (np.ones(shape) if name.endswith(".var") else np.zeros(shape))
        for name, shape in arch.state_shapes().items()
    }
    return FenModel(architecture=arch, params=params, state=state, rng_seed=seed)


# --------------------------------------------------------------------
# forward / backward
# --------------------------------------------------------------------


def _bn(x, params, state, bn_name, train, caches, new_stats):
    gamma = params[f"{bn_name}.gamma"]
    beta = params[f"{bn_name}.beta"]
    if train:
        out, cache, mean, var = L.bn_forward_train(x, gamma, beta)
        caches[bn_name] = cache
        new_stats[bn_name] = (mean, var)
        return out
    return L.bn_forward_eval(x, gamma, beta, state[f"{bn_name}.mean"], state[f"{bn_name}.var"])


def _run_net(params, state, arch: FenArchitecture, x, train: bool):
    """Forward pass over a batch (N, 1, H, W).

    Returns (logits, features, caches, new_stats); caches and new_stats
    are populated only in training mode.
    """
    caches: dict = {}
    new_stats: dict = {}

    out, cache = L.conv2d_forward(x, params["stem.conv.w"], stride=1, pad=1)
    caches["stem.conv"] = cache
    out = _bn(out, params, state, "stem.bn", train, caches, new_stats)
    out, mask = L.relu_forward(out)
    caches["stem.relu"] = mask

    for si in range(len(arch.stage_widths)):
        for bi in range(arch.blocks):
            p = f"s{si}.b{bi}"
            down = arch._downsamples(si, bi)
            stride = 2 if down else 1

            h, cache = L.conv2d_forward(out, params[f"{p}.conv1.w"], stride=stride, pad=1)
            caches[f"{p}.conv1"] = cache
            h = _bn(h, params, state, f"{p}.bn1", train, caches, new_stats)
            h, mask = L.relu_forward(h)
            caches[f"{p}.relu1"] = mask
            h, cache = L.conv2d_forward(h, params[f"{p}.conv2.w"], stride=1, pad=1)
            caches[f"{p}.conv2"] = cache
            h = _bn(h, params, state, f"{p}.bn2", train, caches, new_stats)

            if down:
                skip, cache = L.conv2d_forward(out, params[f"{p}.proj.w"], stride=2, pad=0)
                caches[f"{p}.proj"] = cache
                skip = _bn(skip, params, state, f"{p}.projbn", train, caches, new_stats)
            else:
                skip = out
            out, mask = L.relu_forward(h + skip)
            caches[f"{p}.relu2"] = mask

    pooled, cache = L.gap_forward(out)
    caches["gap"] = cache
    neck, cache = L.linear_forward(pooled, params["neck.w"], params["neck.b"])
    caches["neck"] = cache
    features, mask = L.relu_forward(neck)
    caches["neck.relu"] = mask
    logits, cache = L.linear_forward(features, params["head.w"], params["head.b"])
    caches["head"] = cache
    return logits, features, caches, new_stats


def _backward_net(dlogits, params, arch: FenArchitecture, caches):
    grads: dict[str, np.ndarray] = {}

    d, grads["head.w"], grads["head.b"] = L.linear_backward(dlogits, params["head.w"], caches["head"])
    d = L.relu_backward(d, caches["neck.relu"])
    d, grads["neck.w"], grads["neck.b"] = L.linear_backward(d, params["neck.w"], caches["neck"])
    d = L.gap_backward(d, caches["gap"])

    for si in reversed(range(len(arch.stage_widths))):
        for bi in reversed(range(arch.blocks)):
            p = f"s{si}.b{bi}"
            down = arch._downsamples(si, bi)

            d = L.relu_backward(d, caches[f"{p}.relu2"])
            dskip = d
            dh, grads[f"{p}.bn2.gamma"], grads[f"{p}.bn2.beta"] = L.bn_backward(d, caches[f"{p}.bn2"])
            dh, grads[f"{p}.conv2.w"] = L.conv2d_backward(dh, params[f"{p}.conv2.w"], caches[f"{p}.conv2"])
            dh = L.relu_backward(dh, caches[f"{p}.relu1"])
            dh, grads[f"{p}.bn1.gamma"], grads[f"{p}.bn1.beta"] = L.bn_backward(dh, caches[f"{p}.bn1"])
            dx, grads[f"{p}.conv1.w"] = L.conv2d_backward(dh, params[f"{p}.conv1.w"], caches[f"{p}.conv1"])

            if down:
                dp, grads[f"{p}.projbn.gamma"], grads[f"{p}.projbn.beta"] = L.bn_backward(
                    dskip, caches[f"{p}.projbn"]
                )
                dp, grads[f"{p}.proj.w"] = L.conv2d_backward(dp, params[f"{p}.proj.w"], caches[f"{p}.proj"])
                d = dx + dp
            else:
                d = dx + dskip

    d = L.relu_backward(d, caches["stem.relu"])
    d, grads["stem.bn.gamma"], grads["stem.bn.beta"] = L.bn_backward(d, caches["stem.bn"])
    _, grads["stem.conv.w"] = L.conv2d_backward(d, params["stem.conv.w"], caches["stem.conv"])
    return grads


def _to_batch(images) -> np.ndarray:
    """Stack images (GrayImage or 2-d arrays) into an (N, 1, H, W) batch."""
    arrays = []
    for img in images:
        px = img.pixels if isinstance(img, GrayImage) else np.asarray(img, dtype=float)
        if px.ndim != 2 or px.shape[0] != px.shape[1]:
            raise ShapeMismatch(f"image must be square 2-d, got shape {px.shape}")
        arrays.append(px)
    sides = {a.shape[0] for a in arrays}
    if len(sides) > 1:
        raise ShapeMismatch(f"images in one batch must share a side, got sides {sorted(sides)}")
    return np.stack(arrays)[:, None, :, :]


def forward(model: FenModel, image) -> tuple[np.ndarray, np.ndarray]:
    """Logits and penultimate features for one image (inference mode)."""
    x = _to_batch([image])
    if x.shape[-1] < model.architecture.min_side:
        raise ShapeMismatch(
            f"image side {x.shape[-1]} < minimum {model.architecture.min_side}"
        )
    logits, features, _, _ = _run_net(model.params, model.state, model.architecture, x, train=False)
    return logits[0], features[0]


def extract_features(model: FenModel, image) -> np.ndarray:
    """Penultimate activations for one image; pure in the weights."""
    return forward(model, image)[1]


def extract_features_batch(model: FenModel, images, chunk: int = 256) -> np.ndarray:
    """Feature matrix for a sequence of same-side images."""
    x = _to_batch(images)
    if x.shape[-1] < model.architecture.min_side:
        raise ShapeMismatch(
            f"image side {x.shape[-1]} < minimum {model.architecture.min_side}"
        )
    outs = []
    for start in range(0, x.shape[0], chunk):
        _, feats, _, _ = _run_net(
            model.params, model.state, model.architecture, x[start:start + chunk], train=False
        )
        outs.append(feats)
    return np.concatenate(outs, axis=0)


def loss_and_grad(model: FenModel, images, labels, update_running: bool = False):
    """Mean cross-entropy over a batch and gradients for every weight.

    Runs batch-norm in training mode (batch statistics).  With
    ``update_running`` the running statistics are refreshed in place;
    the default leaves the model untouched, so the call is pure.
    """
    labels = np.asarray(labels, dtype=int)
    if labels.size == 0:
        raise ValueError("batch must be nonempty")
    if labels.min() < 1 or labels.max() > model.architecture.classes:
        raise ValueError(f"labels must lie in 1..{model.architecture.classes}")
    x = _to_batch(images)
    if x.shape[0] != labels.size:
        raise ShapeMismatch(f"{x.shape[0]} images but {labels.size} labels")

    logits, _, caches, new_stats = _run_net(model.params, model.state, model.architecture, x, train=True)
    loss, dlogits = L.cross_entropy(logits, labels - 1)
    grads = _backward_net(dlogits, model.params, model.architecture, caches)

    if update_running:
        for bn_name, (mean, var) in new_stats.items():
            model.state[f"{bn_name}.mean"] *= 1.0 - BN_MOMENTUM
            model.state[f"{bn_name}.mean"] += BN_MOMENTUM * mean
            model.state[f"{bn_name}.var"] *= 1.0 - BN_MOMENTUM
            model.state[f"{bn_name}.var"] += BN_MOMENTUM * var
    return loss, grads


# --------------------------------------------------------------------
# training
# --------------------------------------------------------------------


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters of one classifier training run."""

    epochs: int = 10
    batch_size: int = 32
    learning_rate: float = 0.01
    momentum: float = 0.9
    optimizer: str = "sgd-momentum"  # or "adam"
    split: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if not 0.0 < self.split < 1.0:
            raise ValueError(f"split must lie in (0, 1), got {self.split}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.optimizer not in ("sgd-momentum", "adam"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")


@dataclass(frozen=True)
class TrainReport:
    """Per-epoch training loss and held-out accuracy."""

    train_loss: tuple[float, ...]
    test_accuracy: tuple[float, ...]
    best_epoch: int
    best_accuracy: float
    best_loss: float

    def __post_init__(self):
        object.__setattr__(self, "train_loss", tuple(float(v) for v in self.train_loss))
        object.__setattr__(self, "test_accuracy", tuple(float(v) for v in self.test_accuracy))
        if any(v < 0 for v in self.train_loss):
            raise ValueError("training loss must be nonnegative")
        if any(not 0.0 <= v <= 1.0 for v in self.test_accuracy):
            raise ValueError("accuracy must lie in [0, 1]")
        if not 1 <= self.best_epoch <= len(self.train_loss):
            raise ValueError(f"best_epoch {self.best_epoch} outside 1..{len(self.train_loss)}")


class _SgdMomentum:
    def __init__(self, params, lr, momentum):
        self.lr = lr
        self.momentum = momentum
        self.velocity = {k: np.zeros_like(v) for k, v in params.items()}

    def step(self, params, grads):
        for name, g in grads.items():
            v = self.velocity[name]
            v *= self.momentum
            v -= self.lr * g
            params[name] += v


class _Adam:
    def __init__(self, params, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}

    def step(self, params, grads):
        self.t += 1
        bc1 = 1.0 - self.beta1 ** self.t
        bc2 = 1.0 - self.beta2 ** self.t
        for name, g in grads.items():
            m = self.m[name]
            v = self.v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            params[name] -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)


def _stratified_split(labels, split, rng):
    train_idx, test_idx = [], []
    for cls in np.unique(labels):
        idx = np.nonzero(labels == cls)[0]
        perm = rng.permutation(idx.size)
        n_train = min(max(int(split * idx.size), 1), idx.size - 1)
        train_idx.extend(idx[perm[:n_train]])
        test_idx.extend(idx[perm[n_train:]])
    return np.sort(np.array(train_idx)), np.sort(np.array(test_idx))


def _accuracy(model, images, labels):
    x = _to_batch(images)
    correct = 0
    for start in range(0, x.shape[0], 256):
        logits, _, _, _ = _run_net(
            model.params, model.state, model.architecture, x[start:start + 256], train=False
        )
        correct += int(np.sum(logits.argmax(axis=1) + 1 == labels[start:start + 256]))
    return correct / labels.size


def train(dataset: LabeledImageSet, arch: FenArchitecture, cfg: TrainConfig):
    """Train a classifier on the labeled image set.

    Stratified train/test split, per-epoch loss and held-out accuracy,
    and the returned model is the snapshot of the best-accuracy epoch
    (ties go to the earlier epoch).  Deterministic given cfg.seed.
    """
    labels = dataset.labels
    for cls in range(1, arch.classes + 1):
        if int(np.sum(labels == cls)) < 4:
            raise InsufficientData(
                f"class {cls} has {int(np.sum(labels == cls))} samples; need >= 4 per class"
            )

    rng = np.random.default_rng(cfg.seed)
    model = init_model(arch, seed=cfg.seed)
    train_idx, test_idx = _stratified_split(labels, cfg.split, rng)
    images = dataset.images
    test_images = [images[i] for i in test_idx]
    test_labels = labels[test_idx]

    optimizer = (
        _SgdMomentum(model.params, cfg.learning_rate, cfg.momentum)
        if cfg.optimizer == "sgd-momentum"
        else _Adam(model.params, cfg.learning_rate)
    )

    losses, accuracies = [], []
    best = None
    for epoch in range(1, cfg.epochs + 1):
        order = train_idx[rng.permutation(train_idx.size)]
        batch_losses = []
        for start in range(0, order.size, cfg.batch_size):
            batch = order[start:start + cfg.batch_size]
            loss, grads = loss_and_grad(
                model, [images[i] for i in batch], labels[batch], update_running=True
            )
            optimizer.step(model.params, grads)
            batch_losses.append(loss * batch.size)
        epoch_loss = exact_sum(np.array(batch_losses)) / order.size
        acc = _accuracy(model, test_images, test_labels)
        losses.append(epoch_loss)
        accuracies.append(acc)
        if best is None or acc > best[1]:
            best = (epoch, acc, epoch_loss, model.copy())

    best_epoch, best_acc, best_loss, best_model = best
    best_model.trained_epochs = best_epoch
    report = TrainReport(
        train_loss=tuple(losses),
        test_accuracy=tuple(accuracies),
        best_epoch=best_epoch,
        best_accuracy=best_acc,
        best_loss=best_loss,
    )
    return best_model, report


# --------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------


def save_model(model: FenModel, path, meta: dict | None = None) -> None:
    """Write a versioned JSON document with full-precision weights.

    Floats are emitted in base-10 shortest-roundtrip form, so decoded
    values are bit-identical to the originals.  ``meta`` adds a
    provenance block (seed, config hash, tool version); load ignores it.
    """
    arch = model.architecture
    doc = {
        "version": MODEL_FORMAT_VERSION,
        "meta": meta or {},
        "architecture": {
            "blocks": arch.blocks,
            "stage_widths": list(arch.stage_widths),
            "feature_dim": arch.feature_dim,
            "classes": arch.classes,
            "min_side": arch.min_side,
        },
        "trained_epochs": model.trained_epochs,
        "rng_seed": model.rng_seed,
        "weight_order": list(arch.param_shapes()),
        "weights": {
            name: {"shape": list(t.shape), "data": t.ravel().tolist()}
            for name, t in model.params.items()
        },
        "state_order": list(arch.state_shapes()),
        "state": {
            name: {"shape": list(t.shape), "data": t.ravel().tolist()}
            for name, t in model.state.items()
        },
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def _decode_tensors(section, expected_shapes):
    tensors = {}
    for name, shape in expected_shapes.items():
        if name not in section:
            raise CorruptModel(f"missing tensor {name!r}")
        entry = section[name]
        data = np.asarray(entry["data"], dtype=float)
        if tuple(entry["shape"]) != shape or data.size != int(np.prod(shape)):
            raise CorruptModel(f"tensor {name!r} has wrong shape")
        tensors[name] = data.reshape(shape)
    return tensors


def load_model(path) -> FenModel:
    """Load a model saved by save_model; outputs match bit-for-bit."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise CorruptModel(f"cannot read model file {path}: {e}") from e
    if not isinstance(doc, dict) or "version" not in doc:
        raise CorruptModel(f"{path}: not a model document")
    if doc["version"] != MODEL_FORMAT_VERSION:
        raise VersionMismatch(
            f"{path}: format version {doc['version']}, supported {MODEL_FORMAT_VERSION}"
        )
    try:
        a = doc["architecture"]
        arch = FenArchitecture(
            blocks=a["blocks"],
            stage_widths=tuple(a["stage_widths"]),
            feature_dim=a["feature_dim"],
            classes=a["classes"],
            min_side=a["min_side"],
        )
        params = _decode_tensors(doc["weights"], arch.param_shapes())
        state = _decode_tensors(doc["state"], arch.state_shapes())
        return FenModel(
            architecture=arch,
            params=params,
            state=state,
            trained_epochs=int(doc["trained_epochs"]),
            rng_seed=int(doc["rng_seed"]),
        )
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, (VersionMismatch, CorruptModel)):
            raise
        raise CorruptModel(f"{path}: malformed model document: {e}") from e
