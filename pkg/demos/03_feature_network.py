#!/usr/bin/env python3
"""Training the 4-class feature-extraction classifier.

Builds the labeled imaging dataset from one synthetic series, trains a
small residual net, inspects the per-epoch trajectory, round-trips the
model through JSON, and extracts penultimate features.

A desk-scale run (a couple of minutes); shrink `length`/`epochs` to
make it faster.
"""

import tempfile
import time
from pathlib import Path

import numpy as np

from intervalcast import DgpSpec, FenArchitecture, TrainConfig, generate_dgp, segment
from intervalcast.fen import extract_features, load_model, save_model, train
from intervalcast.imaging import apply_method, build_classification_dataset, normalize_unit

length, delta, epochs = 1500, 45, 10

print("=" * 64)
print("1. The labeled imaging dataset")
print("=" * 64)

series = generate_dgp(DgpSpec(kind="c1", length=length, seed=7))
dataset = build_classification_dataset(
    segment(series.center, delta, source="center"),
    segment(series.range, delta, source="range"),
)
counts = np.bincount(dataset.labels)[1:]
print(f"{len(dataset)} images of side {delta}; per-class counts {counts.tolist()}")

print()
print("=" * 64)
print("2. Training (deterministic by seed)")
print("=" * 64)

arch = FenArchitecture(blocks=2, stage_widths=(8, 16), feature_dim=64)
cfg = TrainConfig(epochs=epochs, batch_size=32, learning_rate=0.01, seed=11)
t0 = time.time()
model, report = train(dataset, arch, cfg)
print(f"trained in {time.time() - t0:.0f}s")
print(f"{'epoch':>6} {'loss':>8} {'accuracy':>9}")
for i, (loss, acc) in enumerate(zip(report.train_loss, report.test_accuracy), start=1):
    marker = "  <- best" if i == report.best_epoch else ""
    print(f"{i:>6} {loss:>8.4f} {acc:>9.3f}{marker}")

print()
print("=" * 64)
print("3. Serialization round trip")
print("=" * 64)

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "fen.json"
    save_model(model, path)
    loaded = load_model(path)
    img = normalize_unit(apply_method("gasf", series.center[:delta]))
    a = extract_features(model, img)
    b = extract_features(loaded, img)
    print(f"model file: {path.stat().st_size / 1024:.0f} KiB")
    print(f"features bit-identical after reload: {np.array_equal(a, b)}")

print()
print("=" * 64)
print("4. Penultimate features")
print("=" * 64)

window = series.center[:delta]
for method in ("rp", "gasf", "gadf", "mtf"):
    img = normalize_unit(apply_method(method, window, mtf_bins=8))
    feats = extract_features(model, img)
    print(f"{method:<5} features: dim {feats.size}, "
          f"norm {np.linalg.norm(feats):8.3f}, nonzero {int((feats != 0).sum())}")
