"""HoG feature extraction and K-nearest-neighbor rank classification.

Corner patches are described by a 324-value histogram-of-oriented-
gradients vector (28x28 window, 14x14 blocks, 7x7 stride and cells, 9
unsigned orientation bins) and classified by majority vote over the k
nearest training vectors.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CarpError, TrainingDataError
from .raster import ImageGray, ImageRGB
from .reproject import extract_corner

# The 14 classes: ranks ace through king collapse J/Q/K onto their own
# labels, plus the card-back class for face-down cards.
CARD_LABELS = ("2", "3", "4", "5", "6", "7", "8", "9", "10", "J", "Q", "K", "A", "BACK")

BLOCK_CLIP = 0.2  # L2-Hys clipping level


@dataclass(frozen=True)
class HogParams:
    window: tuple[int, int] = (28, 28)
    block: tuple[int, int] = (14, 14)
    block_stride: tuple[int, int] = (7, 7)
    cell: tuple[int, int] = (7, 7)
    bins: int = 9

    def __post_init__(self) -> None:
        for name in ("window", "block"):
            size = getattr(self, name)
            if size[0] % self.cell[0] or size[1] % self.cell[1]:
                raise ValueError(f"{name} {size} not divisible by cell {self.cell}")
        span = (self.window[0] - self.block[0], self.window[1] - self.block[1])
        if span[0] % self.block_stride[0] or span[1] % self.block_stride[1]:
            raise ValueError("block stride does not tile the window")
        if self.bins < 1:
            raise ValueError("bins must be >= 1")

    @property
    def descriptor_length(self) -> int:
        by = (self.window[0] - self.block[0]) // self.block_stride[0] + 1
        bx = (self.window[1] - self.block[1]) // self.block_stride[1] + 1
        cells = (self.block[0] // self.cell[0]) * (self.block[1] // self.cell[1])
        return by * bx * cells * self.bins


def compute_hog(patch: ImageGray, params: HogParams | None = None) -> np.ndarray:
    """HoG descriptor of a window-sized grayscale patch.

    Gradients are centered differences with replicated edges; unsigned
    orientations in [0, 180) vote into the two adjacent 20-degree bins
    weighted by magnitude; 2x2-cell blocks are L2-Hys normalized
    (L2-normalize, clip at 0.2, re-normalize) and concatenated row-major.
    """
    params = params or HogParams()
    img = patch.pixels.astype(np.float64)
    if img.shape != params.window:
        raise ValueError(f"patch shape {img.shape} != window {params.window}")

    gx = np.empty_like(img)
    gx[:, 1:-1] = img[:, 2:] - img[:, :-2]
    gx[:, 0] = img[:, 1] - img[:, 0]
    gx[:, -1] = img[:, -1] - img[:, -2]
    gy = np.empty_like(img)
    gy[1:-1, :] = img[2:, :] - img[:-2, :]
    gy[0, :] = img[1, :] - img[0, :]
    gy[-1, :] = img[-1, :] - img[-2, :]

    mag = np.hypot(gx, gy)
    ang = np.mod(np.degrees(np.arctan2(gy, gx)), 180.0)

    bin_width = 180.0 / params.bins
    pos = ang / bin_width - 0.5
    lo = np.floor(pos)
    frac = pos - lo
    bin_lo = np.mod(lo, params.bins).astype(np.int64)
    bin_hi = np.mod(lo + 1, params.bins).astype(np.int64)
    w_lo = (1.0 - frac) * mag
    w_hi = frac * mag

    ch, cw = params.cell
    ny, nx = params.window[0] // ch, params.window[1] // cw
    hist = np.zeros((ny, nx, params.bins))
    for cy in range(ny):
        for cx in range(nx):
            sl = (slice(cy * ch, (cy + 1) * ch), slice(cx * cw, (cx + 1) * cw))
            hist[cy, cx] = np.bincount(
                bin_lo[sl].ravel(), weights=w_lo[sl].ravel(), minlength=params.bins
            ) + np.bincount(bin_hi[sl].ravel(), weights=w_hi[sl].ravel(), minlength=params.bins)

    bh, bw = params.block[0] // ch, params.block[1] // cw
    sy, sx = params.block_stride[0] // ch, params.block_stride[1] // cw
    blocks = []
    for by in range(0, ny - bh + 1, sy):
        for bx in range(0, nx - bw + 1, sx):
            v = hist[by : by + bh, bx : bx + bw].reshape(-1)
            n1 = np.linalg.norm(v)
            if n1 > 0:
                v = np.minimum(v / n1, BLOCK_CLIP)
                n2 = np.linalg.norm(v)
                if n2 > 0:
                    v = v / n2
            blocks.append(v)
    return np.concatenate(blocks)


@dataclass(frozen=True, eq=False)
class KnnModel:
    """Immutable trained classifier: all training vectors are retained."""

    vectors: np.ndarray  # (n, descriptor_length) float64
    class_indices: np.ndarray  # (n,) int32 into labels
    labels: tuple[str, ...]  # lexicographically sorted unique labels
    k: int = 3
    hog_params: HogParams = field(default_factory=HogParams)

    def __post_init__(self) -> None:
        v = np.ascontiguousarray(self.vectors, dtype=np.float64)
        c = np.ascontiguousarray(self.class_indices, dtype=np.int32)
        if v.ndim != 2 or v.shape[0] < 1 or c.shape != (v.shape[0],):
            raise ValueError("inconsistent training matrix")
        if c.min() < 0 or c.max() >= len(self.labels):
            raise ValueError("class index out of range")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        v.flags.writeable = False
        c.flags.writeable = False
        object.__setattr__(self, "vectors", v)
        object.__setattr__(self, "class_indices", c)

    @property
    def n_examples(self) -> int:
        return self.vectors.shape[0]


def train_knn(
    training_set: list[tuple[ImageGray, str]],
    k: int = 3,
    params: HogParams | None = None,
) -> KnnModel:
    """Build a KNN model from labeled corner patches.

    The label list is the lexicographically sorted set of unique label
    strings; class indices are positions in that list.
    """
    if not training_set:
        raise TrainingDataError("training set is empty")
    params = params or HogParams()
    labels = tuple(sorted({label for _, label in training_set}))
    vectors = np.stack([compute_hog(patch, params) for patch, _ in training_set])
    class_indices = np.array([labels.index(label) for _, label in training_set], dtype=np.int32)
    return KnnModel(vectors=vectors, class_indices=class_indices, labels=labels, k=k, hog_params=params)


def knn_predict(model: KnnModel, features: np.ndarray) -> tuple[str, np.ndarray]:
    """Majority vote over the k nearest training vectors.

    Vote ties break toward the class of the nearest neighbor among the
    tied classes.  Returns the label and the ascending neighbor
    distances (Euclidean).
    """
    f = np.asarray(features, dtype=np.float64).reshape(-1)
    if f.shape[0] != model.vectors.shape[1]:
        raise ValueError(f"feature length {f.shape[0]} != {model.vectors.shape[1]}")
    if model.k > model.n_examples:
        raise CarpError(f"k={model.k} exceeds training set size {model.n_examples}")

    d2 = ((model.vectors - f) ** 2).sum(axis=1)
    order = np.argsort(d2, kind="stable")[: model.k]
    neighbor_classes = model.class_indices[order]
    counts = np.bincount(neighbor_classes, minlength=len(model.labels))
    best = counts.max()
    tied = set(np.flatnonzero(counts == best))
    winner = next(int(c) for c in neighbor_classes if int(c) in tied)
    return model.labels[winner], np.sqrt(d2[order])


def classify_card(model: KnnModel, card: ImageRGB) -> str:
    """Full per-card path: corner crop, HoG, nearest-neighbor vote."""
    patch = extract_corner(card)
    label, _ = knn_predict(model, compute_hog(patch, model.hog_params))
    return label


MODEL_FORMAT_VERSION = 1


def save_model(model: KnnModel, path: str | Path) -> None:
    payload = {
        "version": MODEL_FORMAT_VERSION,
        "k": model.k,
        "hog": {
            "window": list(model.hog_params.window),
            "block": list(model.hog_params.block),
            "block_stride": list(model.hog_params.block_stride),
            "cell": list(model.hog_params.cell),
            "bins": model.hog_params.bins,
        },
        "labels": list(model.labels),
        "class_indices": model.class_indices.tolist(),
        "vectors": model.vectors.tolist(),
    }
    Path(path).write_text(json.dumps(payload))


def load_model(path: str | Path) -> KnnModel:
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise TrainingDataError(f"cannot load model file {path}: {exc}") from exc
    if payload.get("version") != MODEL_FORMAT_VERSION:
        raise TrainingDataError(f"unsupported model version {payload.get('version')}")
    hog = payload["hog"]
    params = HogParams(
        window=tuple(hog["window"]),
        block=tuple(hog["block"]),
        block_stride=tuple(hog["block_stride"]),
        cell=tuple(hog["cell"]),
        bins=hog["bins"],
    )
    return KnnModel(
        vectors=np.array(payload["vectors"], dtype=np.float64),
        class_indices=np.array(payload["class_indices"], dtype=np.int32),
        labels=tuple(payload["labels"]),
        k=payload["k"],
        hog_params=params,
    )
