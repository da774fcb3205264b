"""Time-series-to-image transforms and the labeled 4-class image dataset.

Four encodings turn a window of length n into an n-by-n grayscale image:

- rp:   pairwise distance matrix |w_i - w_j| (unthresholded recurrence
        plot, embedding dimension 1, delay 1; optional binary threshold).
- gasf: cos(phi_i + phi_j) with phi = arccos of the window rescaled to
        [-1, 1].
- gadf: sin(phi_i - phi_j), same angles.
- mtf:  Markov transition probabilities between quantile bins, indexed
        by the bins of the time pair (i, j).

Images produced by the same encoding share a class label (rp=1, gasf=2,
gadf=3, mtf=4), which yields a free supervised task for training the
feature-extraction classifier.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import BinCountTooLarge
from .lags import SegmentSet

_RANGE_TOL = 1e-9


class ImagingMethod(enum.IntEnum):
    """The four encodings; integer values are the class label codes."""

    RP = 1
    GASF = 2
    GADF = 3
    MTF = 4

    @classmethod
    def parse(cls, name) -> "ImagingMethod":
        if isinstance(name, cls):
            return name
        try:
            return cls[str(name).upper()]
        except KeyError:
            raise ValueError(
                f"unknown imaging method {name!r}; expected one of "
                f"{[m.name.lower() for m in cls]}"
            ) from None


@dataclass(frozen=True)
class GrayImage:
    """Square grayscale image with a declared encoding value range."""

    pixels: np.ndarray
    value_range: tuple[float, float]

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=float)
        if px.ndim != 2 or px.shape[0] != px.shape[1]:
            raise ValueError(f"pixels must be square, got shape {px.shape}")
        if px.shape[0] < 2:
            raise ValueError(f"image side must be >= 2, got {px.shape[0]}")
        lo, hi = self.value_range
        if px.min() < lo - _RANGE_TOL or px.max() > hi + _RANGE_TOL:
            raise ValueError(
                f"pixels [{px.min()}, {px.max()}] exceed declared range [{lo}, {hi}]"
            )
        object.__setattr__(self, "pixels", px)
        object.__setattr__(self, "value_range", (float(lo), float(hi)))

    @property
    def n(self) -> int:
        return self.pixels.shape[0]


def _as_window(w):
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or w.size < 2:
        raise ValueError(f"window must be a 1-d sequence of length >= 2, got shape {w.shape}")
    return w


def rescale_minmax(w) -> np.ndarray:
    """Affine map of a window onto [-1, 1] (min -> -1, max -> +1).

    A constant window maps to all zeros so downstream transforms stay
    defined.
    """
    w = np.asarray(w, dtype=float)
    lo = w.min()
    hi = w.max()
    if hi == lo:
        return np.zeros_like(w)
    return (2.0 * w - hi - lo) / (hi - lo)


def rp(w, threshold: float | None = None) -> GrayImage:
    """Recurrence image: R_ij = |w_i - w_j|.

    With ``threshold`` set, emits the classic binary plot instead
    (1 where |w_i - w_j| <= threshold).
    """
    w = _as_window(w)
    r = np.abs(w[:, None] - w[None, :])
    if threshold is not None:
        return GrayImage(pixels=(r <= threshold).astype(float), value_range=(0.0, 1.0))
    return GrayImage(pixels=r, value_range=(0.0, float(w.max() - w.min())))


def _angles(w):
    scaled = np.clip(rescale_minmax(_as_window(w)), -1.0, 1.0)
    return np.arccos(scaled)


def gasf(w) -> GrayImage:
    """Gramian angular summation image: cos(phi_i + phi_j)."""
    phi = _angles(w)
    g = np.clip(np.cos(phi[:, None] + phi[None, :]), -1.0, 1.0)
    return GrayImage(pixels=g, value_range=(-1.0, 1.0))


def gadf(w) -> GrayImage:
    """Gramian angular difference image: sin(phi_i - phi_j)."""
    phi = _angles(w)
    g = np.clip(np.sin(phi[:, None] - phi[None, :]), -1.0, 1.0)
    return GrayImage(pixels=g, value_range=(-1.0, 1.0))


def mtf(w, bins: int = 8) -> GrayImage:
    """Markov transition image over quantile bins.

    The window is quantile-binned into ``bins`` equal-count states
    (boundary values go to the lower bin); adjacent transitions are
    counted and row-normalized (all-zero rows become uniform); pixel
    (i, j) is the transition probability between the bins of w_i and w_j.
    """
    w = _as_window(w)
    if bins < 2:
        raise ValueError(f"bin count must be >= 2, got {bins}")
    if bins > w.size:
        raise BinCountTooLarge(f"bin count {bins} > window length {w.size}")

    edges = np.quantile(w, np.arange(1, bins) / bins)
    # side='left': a value equal to an edge stays in the lower bin
    states = np.searchsorted(edges, w, side="left")

    counts = np.zeros((bins, bins))
    np.add.at(counts, (states[:-1], states[1:]), 1.0)
    row_sums = counts.sum(axis=1, keepdims=True)
    empty = row_sums[:, 0] == 0
    counts[empty] = 1.0 / bins
    row_sums[empty] = 1.0
    trans = counts / row_sums

    return GrayImage(pixels=trans[states[:, None], states[None, :]], value_range=(0.0, 1.0))


def apply_method(method: ImagingMethod, w, mtf_bins: int = 8) -> GrayImage:
    """Apply one encoding to a window."""
    method = ImagingMethod.parse(method)
    if method is ImagingMethod.RP:
        return rp(w)
    if method is ImagingMethod.GASF:
        return gasf(w)
    if method is ImagingMethod.GADF:
        return gadf(w)
    return mtf(w, bins=mtf_bins)


def normalize_unit(img: GrayImage) -> GrayImage:
    """Map an image's declared value range onto [0, 1] for classifier input.

    The four encodings have different native ranges; each image is
    normalized by its own declared range (degenerate range -> zeros).
    """
    lo, hi = img.value_range
    if hi == lo:
        return GrayImage(pixels=np.zeros_like(img.pixels), value_range=(0.0, 1.0))
    px = np.clip((img.pixels - lo) / (hi - lo), 0.0, 1.0)
    return GrayImage(pixels=px, value_range=(0.0, 1.0))


def resize_bilinear(img: GrayImage, n: int) -> GrayImage:
    """Bilinear resample to an n-by-n image (corner-aligned grid)."""
    if n < 2:
        raise ValueError(f"target side must be >= 2, got {n}")
    src = img.pixels
    m = img.n
    if n == m:
        return img
    pos = np.arange(n) * (m - 1) / (n - 1)
    i0 = np.minimum(pos.astype(int), m - 2)
    frac = pos - i0
    top = src[i0][:, i0] * (1 - frac)[:, None] + src[i0 + 1][:, i0] * frac[:, None]
    bot = src[i0][:, i0 + 1] * (1 - frac)[:, None] + src[i0 + 1][:, i0 + 1] * frac[:, None]
    out = top * (1 - frac)[None, :] + bot * frac[None, :]
    lo, hi = img.value_range
    return GrayImage(pixels=np.clip(out, lo, hi), value_range=img.value_range)


@dataclass(frozen=True)
class LabeledImageSet:
    """Images paired with encoding labels in {1, 2, 3, 4}."""

    images: list[GrayImage] = field(default_factory=list)
    labels: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    provenance: str = "merged"

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=int)
        if labels.size != len(self.images):
            raise ValueError(f"{len(self.images)} images but {labels.size} labels")
        if labels.size and (labels.min() < 1 or labels.max() > 4):
            raise ValueError("labels must lie in {1, 2, 3, 4}")
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return len(self.images)


def build_classification_dataset(
    center_segments: SegmentSet,
    range_segments: SegmentSet,
    mtf_bins: int = 8,
) -> LabeledImageSet:
    """Image every segment with all four encodings and label by encoding.

    Each segment contributes exactly four items (rp=1, gasf=2, gadf=3,
    mtf=4); the center and range sets are merged into one dataset.  All
    pixels are normalized to [0, 1] for classifier input.
    """
    images: list[GrayImage] = []
    labels: list[int] = []
    for segset in (center_segments, range_segments):
        for row in segset.segments:
            for method in ImagingMethod:
                images.append(normalize_unit(apply_method(method, row, mtf_bins=mtf_bins)))
                labels.append(int(method))
    return LabeledImageSet(images=images, labels=np.array(labels, dtype=int), provenance="merged")


def export_png(img: GrayImage, path, method=None, window_indices=None) -> None:
    """Write an 8-bit grayscale PNG plus a JSON sidecar.

    The image is normalized to its declared range before linear
    quantization; the sidecar records method, window indices, and the
    original value range.
    """
    from PIL import Image

    path = str(path)
    px = normalize_unit(img).pixels
    Image.fromarray(np.round(px * 255.0).astype(np.uint8), mode="L").save(path)
    sidecar = {
        "method": ImagingMethod.parse(method).name if method is not None else None,
        "window_indices": list(window_indices) if window_indices is not None else None,
        "value_range": list(img.value_range),
        "side": img.n,
    }
    with open(path + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=2)
        fh.write("\n")
