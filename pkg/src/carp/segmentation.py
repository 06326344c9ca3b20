"""Card/background separation by K-means clustering in RGB space.

Clustering runs on the flattened pixel set; cluster selection happens in
HSV: the winning cluster is the one with the highest luminance and the
lowest saturation, which on a card table is the white card stock.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidImageError
from .raster import BinaryMask, ImageRGB, rgb_to_hsv

DEFAULT_SEED = 7


@dataclass(frozen=True)
class KMeansParams:
    k: int = 3
    max_iter: int = 10
    epsilon: float = 1.0
    attempts: int = 10
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.attempts < 1:
            raise ValueError("attempts must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be >= 0")


@dataclass(frozen=True, eq=False)
class ClusterResult:
    """Winning restart of kmeans_pixels.

    labels is a height x width int32 map of cluster indices; centers is a
    k x 3 float array (real-valued, not rounded).  compactness_history
    logs the objective after each assignment step of the winning restart;
    attempt_compactness records the final objective of every restart.
    """

    labels: np.ndarray
    centers: np.ndarray
    compactness: float
    compactness_history: tuple[float, ...] = field(default=())
    attempt_compactness: tuple[float, ...] = field(default=())


@dataclass(frozen=True, eq=False)
class Segmentation:
    mask: BinaryMask
    label_map: np.ndarray
    selected: int
    scores: np.ndarray
    clusters: ClusterResult


def _assign(colors: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest-center labels plus squared distance, per unique color."""
    d2 = ((colors[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = np.argmin(d2, axis=1)
    best = d2[np.arange(len(labels)), labels]
    return labels, best


def _kmeans_pp_init(
    colors: np.ndarray, counts: np.ndarray, k: int, rng: np.random.Generator
) -> np.ndarray:
    """k-means++ over the color histogram; each color weighs its pixel count."""
    total_pixels = counts.sum()
    cum_counts = np.cumsum(counts)

    def pick_uniform() -> int:
        r = rng.integers(total_pixels)
        return min(int(np.searchsorted(cum_counts, r, side="right")), len(colors) - 1)

    centers = np.empty((k, 3), dtype=np.float64)
    centers[0] = colors[pick_uniform()]
    d2 = ((colors - centers[0]) ** 2).sum(axis=1)
    for i in range(1, k):
        weights = d2 * counts
        total = weights.sum()
        if total <= 0.0:
            idx = pick_uniform()
        else:
            r = rng.random() * total
            idx = min(int(np.searchsorted(np.cumsum(weights), r)), len(colors) - 1)
        centers[i] = colors[idx]
        np.minimum(d2, ((colors - centers[i]) ** 2).sum(axis=1), out=d2)
    return centers


def _lloyd(
    colors: np.ndarray,
    counts: np.ndarray,
    centers: np.ndarray,
    max_iter: int,
    epsilon: float,
) -> tuple[np.ndarray, np.ndarray, float, tuple[float, ...]]:
    k = centers.shape[0]
    history = []
    for _ in range(max_iter):
        labels, d2 = _assign(colors, centers)
        history.append(float((d2 * counts).sum()))

        cluster_counts = np.bincount(labels, weights=counts, minlength=k)
        new_centers = np.empty_like(centers)
        for ch in range(3):
            sums = np.bincount(labels, weights=colors[:, ch] * counts, minlength=k)
            new_centers[:, ch] = np.divide(
                sums, cluster_counts, out=np.zeros(k), where=cluster_counts > 0
            )

        # Reseed empty clusters onto the worst-fit color so k effective
        # clusters survive; ties resolve to the earliest color.
        empty = np.flatnonzero(cluster_counts == 0)
        if empty.size:
            d2_pool = d2.copy()
            for j in empty:
                worst = int(np.argmax(d2_pool))
                new_centers[j] = colors[worst]
                d2_pool[worst] = -1.0
        move = float(np.sqrt(((new_centers - centers) ** 2).sum(axis=1)).max())
        centers = new_centers
        if move < epsilon:
            break

    labels, d2 = _assign(colors, centers)
    compactness = float((d2 * counts).sum())
    history.append(compactness)
    return labels, centers, compactness, tuple(history)


def kmeans_pixels(img: ImageRGB, params: KMeansParams) -> ClusterResult:
    """Lloyd's algorithm with k-means++ seeding over the flattened pixels.

    Runs params.attempts independent restarts (restart j is seeded with
    params.seed XOR j) and returns the restart with the lowest sum of
    squared distances.  Deterministic for a fixed seed.

    Internally the iteration runs on the image's unique colors weighted
    by their pixel counts, which is algebraically the same clustering
    but far cheaper on images with few distinct colors.
    """
    h, w = img.height, img.width
    if w * h < params.k:
        raise InvalidImageError(f"image has {w * h} pixels, fewer than k={params.k}")

    flat = img.pixels.reshape(-1, 3)
    packed = (
        flat[:, 0].astype(np.uint32) << 16
        | flat[:, 1].astype(np.uint32) << 8
        | flat[:, 2].astype(np.uint32)
    )
    unique, inverse, counts = np.unique(packed, return_inverse=True, return_counts=True)
    colors = np.column_stack([unique >> 16 & 0xFF, unique >> 8 & 0xFF, unique & 0xFF]).astype(
        np.float64
    )
    counts = counts.astype(np.float64)

    best: tuple | None = None
    attempt_comp = []
    for j in range(params.attempts):
        rng = np.random.default_rng(params.seed ^ j)
        init = _kmeans_pp_init(colors, counts, params.k, rng)
        labels, centers, comp, hist = _lloyd(colors, counts, init, params.max_iter, params.epsilon)
        attempt_comp.append(comp)
        if best is None or comp < best[2]:
            best = (labels, centers, comp, hist)

    labels, centers, comp, hist = best
    return ClusterResult(
        labels=labels[inverse].astype(np.int32).reshape(h, w),
        centers=centers,
        compactness=comp,
        compactness_history=hist,
        attempt_compactness=tuple(attempt_comp),
    )


def score_clusters(img: ImageRGB, labels: np.ndarray, k: int) -> np.ndarray:
    """Per-cluster score (255 - mean saturation) + mean luminance.

    White pixels score 510, anything saturated or dark scores lower.
    Empty clusters score -inf so they are never selected.
    """
    flat = np.asarray(labels).reshape(-1)
    if flat.shape[0] != img.width * img.height:
        raise InvalidImageError("label map does not match image dimensions")
    if flat.size and (flat.min() < 0 or flat.max() >= k):
        raise InvalidImageError("cluster index out of range")
    hsv = rgb_to_hsv(img).reshape(-1, 3).astype(np.float64)

    scores = np.full(k, -np.inf)
    counts = np.bincount(flat, minlength=k)
    sat = np.bincount(flat, weights=hsv[:, 1], minlength=k)
    val = np.bincount(flat, weights=hsv[:, 2], minlength=k)
    nz = counts > 0
    scores[nz] = (255.0 - sat[nz] / counts[nz]) + val[nz] / counts[nz]
    return scores


def segment_cards(img: ImageRGB, params: KMeansParams | None = None) -> Segmentation:
    """Cluster the image and keep the brightest, least-saturated cluster.

    Returns the binary card mask, the full label map, and the selected
    cluster index (ties broken toward the lowest index).
    """
    params = params or KMeansParams()
    clusters = kmeans_pixels(img, params)
    scores = score_clusters(img, clusters.labels, params.k)
    selected = int(np.argmax(scores))
    mask = BinaryMask((clusters.labels == selected).astype(np.uint8))
    return Segmentation(
        mask=mask,
        label_map=clusters.labels,
        selected=selected,
        scores=scores,
        clusters=clusters,
    )
