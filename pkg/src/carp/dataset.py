"""Training-data ingestion and classifier evaluation.

The training layout follows the `<index>-<label>/` directory convention:
each subdirectory holds 28x28 grayscale corner patches for one label,
where `<label>` is everything after the first hyphen.

Evaluation produces the familiar classification-report table: per-class
precision / recall / f1 / support, an accuracy line, and macro and
support-weighted averages, plus the confusion matrix behind them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .classify import CARD_LABELS, KnnModel, compute_hog, knn_predict
from .errors import TrainingDataError
from .raster import CornerPatch, load_image_gray
from .synth import SyntheticScene

PATCH_SIZE = (28, 28)
_IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg"}

# A detection belongs to a ground-truth card when their centroids are
# closer than this fraction of the card diagonal.
MATCH_DIAGONAL_FRACTION = 0.25


@dataclass(frozen=True, eq=False)
class LabeledPatch:
    patch: CornerPatch
    label: str
    source: str


def load_training_dir(path: str | Path) -> list[LabeledPatch]:
    """Load every patch under `<index>-<label>/` subdirectories."""
    root = Path(path)
    if not root.is_dir():
        raise TrainingDataError(f"training directory {root} does not exist")
    patches = []
    for sub in sorted(p for p in root.iterdir() if p.is_dir()):
        parts = sub.name.split("-", maxsplit=1)
        if len(parts) != 2 or not parts[1]:
            raise TrainingDataError(f"directory name {sub.name!r} is not <index>-<label>")
        label = parts[1]
        if label not in CARD_LABELS:
            raise TrainingDataError(f"unknown label {label!r} in {sub.name!r}")
        for f in sorted(sub.iterdir()):
            if f.suffix.lower() not in _IMAGE_SUFFIXES:
                continue
            patch = load_image_gray(f)
            if (patch.height, patch.width) != PATCH_SIZE:
                raise TrainingDataError(
                    f"{f}: patch is {patch.width}x{patch.height}, expected 28x28"
                )
            patches.append(LabeledPatch(patch=patch, label=label, source=str(f)))
    return patches


# ---------------------------------------------------------------------------
# Metrics


def weighted_average(values, supports) -> float:
    """Support-weighted mean, the footer convention of the report table."""
    values = np.asarray(values, dtype=np.float64)
    supports = np.asarray(supports, dtype=np.float64)
    total = supports.sum()
    if total <= 0:
        return 0.0
    return float((values * supports).sum() / total)


@dataclass(frozen=True, eq=False)
class EvalReport:
    """Classification metrics over matched (truth, prediction) pairs.

    The confusion matrix covers matched detections only; ground-truth
    cards that no detection claimed are tallied in `missed` and stray
    detections in `spurious`, so detection quality stays visible next to
    classification quality.
    """

    labels: tuple[str, ...]
    matrix: np.ndarray  # (n, n) int64, rows = truth, cols = prediction
    missed: tuple[int, ...]  # per-label unmatched ground truth
    spurious: tuple[int, ...]  # per-label unmatched detections

    @property
    def supports(self) -> np.ndarray:
        return self.matrix.sum(axis=1)

    @property
    def precisions(self) -> np.ndarray:
        col = self.matrix.sum(axis=0)
        diag = np.diag(self.matrix)
        return np.divide(diag, col, out=np.zeros(len(self.labels)), where=col > 0)

    @property
    def recalls(self) -> np.ndarray:
        sup = self.supports
        diag = np.diag(self.matrix)
        return np.divide(diag, sup, out=np.zeros(len(self.labels)), where=sup > 0)

    @property
    def f1_scores(self) -> np.ndarray:
        p, r = self.precisions, self.recalls
        s = p + r
        return np.divide(2 * p * r, s, out=np.zeros(len(self.labels)), where=s > 0)

    @property
    def accuracy(self) -> float:
        total = self.matrix.sum()
        return float(np.trace(self.matrix) / total) if total else 0.0

    @property
    def total_support(self) -> int:
        return int(self.matrix.sum())

    @property
    def macro_avg(self) -> tuple[float, float, float]:
        return (
            float(self.precisions.mean()),
            float(self.recalls.mean()),
            float(self.f1_scores.mean()),
        )

    @property
    def weighted_avg(self) -> tuple[float, float, float]:
        sup = self.supports
        return (
            weighted_average(self.precisions, sup),
            weighted_average(self.recalls, sup),
            weighted_average(self.f1_scores, sup),
        )

    @property
    def n_missed(self) -> int:
        return int(sum(self.missed))

    @property
    def n_spurious(self) -> int:
        return int(sum(self.spurious))

    @property
    def detection_recall(self) -> float:
        truths = self.total_support + self.n_missed
        return float(self.total_support / truths) if truths else 1.0

    def text_table(self) -> str:
        """Aligned report mirroring the classic classification-report layout."""
        rows = [("Card", "precision", "recall", "f1-score", "support")]
        p, r, f, s = self.precisions, self.recalls, self.f1_scores, self.supports
        for i, label in enumerate(self.labels):
            rows.append((label, f"{p[i]:.2f}", f"{r[i]:.2f}", f"{f[i]:.2f}", str(int(s[i]))))
        rows.append(("Accuracy", "", "", f"{self.accuracy:.2f}", str(self.total_support)))
        mp, mr, mf = self.macro_avg
        rows.append(("macro avg", f"{mp:.2f}", f"{mr:.2f}", f"{mf:.2f}", str(self.total_support)))
        wp, wr, wf = self.weighted_avg
        rows.append(
            ("weighted avg", f"{wp:.2f}", f"{wr:.2f}", f"{wf:.2f}", str(self.total_support))
        )
        widths = [max(len(row[c]) for row in rows) for c in range(5)]
        lines = []
        for row in rows:
            cells = [row[0].ljust(widths[0])] + [row[c].rjust(widths[c] + 2) for c in range(1, 5)]
            lines.append("".join(cells))
        return "\n".join(lines)

    def to_csv(self) -> str:
        lines = ["label,precision,recall,f1,support,missed,spurious"]
        p, r, f, s = self.precisions, self.recalls, self.f1_scores, self.supports
        for i, label in enumerate(self.labels):
            lines.append(
                f"{label},{p[i]:.4f},{r[i]:.4f},{f[i]:.4f},{int(s[i])},"
                f"{self.missed[i]},{self.spurious[i]}"
            )
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        mp, mr, mf = self.macro_avg
        wp, wr, wf = self.weighted_avg
        return {
            "labels": list(self.labels),
            "confusion_matrix": self.matrix.tolist(),
            "per_class": {
                label: {
                    "precision": round(float(self.precisions[i]), 4),
                    "recall": round(float(self.recalls[i]), 4),
                    "f1": round(float(self.f1_scores[i]), 4),
                    "support": int(self.supports[i]),
                    "missed": self.missed[i],
                    "spurious": self.spurious[i],
                }
                for i, label in enumerate(self.labels)
            },
            "accuracy": round(self.accuracy, 4),
            "macro_avg": {"precision": round(mp, 4), "recall": round(mr, 4), "f1": round(mf, 4)},
            "weighted_avg": {
                "precision": round(wp, 4),
                "recall": round(wr, 4),
                "f1": round(wf, 4),
            },
            "total_support": self.total_support,
            "detection": {
                "matched": self.total_support,
                "missed": self.n_missed,
                "spurious": self.n_spurious,
                "recall": round(self.detection_recall, 4),
            },
        }


def build_report(
    pairs: list[tuple[str, str]],
    missed: dict[str, int] | None = None,
    spurious: dict[str, int] | None = None,
) -> EvalReport:
    """Assemble an EvalReport from matched (truth, prediction) pairs."""
    missed = missed or {}
    spurious = spurious or {}
    present = {t for t, _ in pairs} | {p for _, p in pairs} | set(missed) | set(spurious)
    labels = tuple(sorted(present))
    index = {label: i for i, label in enumerate(labels)}
    matrix = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for truth, pred in pairs:
        matrix[index[truth], index[pred]] += 1
    return EvalReport(
        labels=labels,
        matrix=matrix,
        missed=tuple(int(missed.get(label, 0)) for label in labels),
        spurious=tuple(int(spurious.get(label, 0)) for label in labels),
    )


# ---------------------------------------------------------------------------
# Full-pipeline evaluation


def _match_detections(truths, detections) -> tuple[list[tuple[int, int]], list[int], list[int]]:
    """Greedy nearest-centroid matching within 0.25 x card diagonal."""
    candidates = []
    for ti, truth in enumerate(truths):
        tc = truth.quad.centroid
        limit = MATCH_DIAGONAL_FRACTION * truth.quad.diagonal
        for di, det in enumerate(detections):
            d = math.dist(tc, det.quad.centroid)
            if d <= limit:
                candidates.append((d, ti, di))
    candidates.sort()
    matched_t: set[int] = set()
    matched_d: set[int] = set()
    pairs = []
    for _, ti, di in candidates:
        if ti in matched_t or di in matched_d:
            continue
        matched_t.add(ti)
        matched_d.add(di)
        pairs.append((ti, di))
    unmatched_t = [i for i in range(len(truths)) if i not in matched_t]
    unmatched_d = [i for i in range(len(detections)) if i not in matched_d]
    return pairs, unmatched_t, unmatched_d


def evaluate_scenes(model: KnnModel, scenes: list[SyntheticScene]) -> EvalReport:
    """Run the detection + classification pipeline over rendered scenes."""
    from .pipeline import detect_cards

    if not scenes:
        raise TrainingDataError("evaluation set is empty")
    pairs: list[tuple[str, str]] = []
    missed: dict[str, int] = {}
    spurious: dict[str, int] = {}
    for scene in scenes:
        detections = detect_cards(scene.image, model).detections
        matches, unmatched_t, unmatched_d = _match_detections(scene.ground_truth, detections)
        for ti, di in matches:
            pairs.append((scene.ground_truth[ti].label, detections[di].label))
        for ti in unmatched_t:
            label = scene.ground_truth[ti].label
            missed[label] = missed.get(label, 0) + 1
        for di in unmatched_d:
            label = detections[di].label
            spurious[label] = spurious.get(label, 0) + 1
    return build_report(pairs, missed, spurious)


def evaluate_patches(model: KnnModel, patches: list[LabeledPatch]) -> EvalReport:
    """Classify pre-cut corner patches (no detection stage)."""
    if not patches:
        raise TrainingDataError("evaluation set is empty")
    pairs = []
    for item in patches:
        pred, _ = knn_predict(model, compute_hog(item.patch, model.hog_params))
        pairs.append((item.label, pred))
    return build_report(pairs)
