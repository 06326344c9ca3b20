"""Matplotlib renderings: annotated detections, confusion matrices, debug views.

Everything renders straight to files through the Agg backend, so these
work in headless environments.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.patches import Polygon as MplPolygon

from .dataset import EvalReport
from .pipeline import AnalysisResult, DebugArtifacts
from .raster import ImageRGB, save_image

ROLE_COLORS = {"player": "#00d5ff", "dealer": "#ff9f1a", "unassigned": "#f7e017"}


def save_annotated(img: ImageRGB, result: AnalysisResult, path: str | Path) -> None:
    """Detection overlay: quads, labels, roles, and the recommended move."""
    fig, ax = plt.subplots(figsize=(img.width / 100.0, img.height / 100.0), dpi=100)
    ax.imshow(img.pixels)
    for det in result.detections:
        color = ROLE_COLORS.get(det.role, ROLE_COLORS["unassigned"])
        ax.add_patch(MplPolygon(det.quad.points, closed=True, fill=False, edgecolor=color, linewidth=2))
        x, y = det.quad.tl
        tag = det.label if det.role == "unassigned" else f"{det.label} ({det.role})"
        ax.annotate(
            tag,
            (x, y),
            xytext=(0, -6),
            textcoords="offset points",
            color="white",
            fontsize=9,
            fontweight="bold",
            bbox={"facecolor": color, "edgecolor": "none", "alpha": 0.85, "pad": 2},
        )
    if result.recommendation is not None:
        ax.set_title(result.recommendation.display, fontsize=14)
    ax.set_axis_off()
    fig.savefig(path, bbox_inches="tight", pad_inches=0.05)
    plt.close(fig)


def save_confusion_matrix(report: EvalReport, path: str | Path) -> None:
    """Confusion-matrix heatmap with per-cell counts."""
    n = len(report.labels)
    fig, ax = plt.subplots(figsize=(max(5.0, 0.55 * n + 2), max(4.0, 0.55 * n + 1.5)))
    im = ax.imshow(report.matrix, cmap="Blues")
    ax.set_xticks(range(n), report.labels, rotation=45, ha="right")
    ax.set_yticks(range(n), report.labels)
    ax.set_xlabel("predicted")
    ax.set_ylabel("true")
    vmax = report.matrix.max() if report.matrix.size else 1
    for i in range(n):
        for j in range(n):
            v = report.matrix[i, j]
            if v:
                ax.text(
                    j,
                    i,
                    str(v),
                    ha="center",
                    va="center",
                    fontsize=8,
                    color="white" if v > vmax / 2 else "black",
                )
    fig.colorbar(im, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_cluster_overlay(img: ImageRGB, label_map: np.ndarray, path: str | Path) -> None:
    """False-color cluster overlay of the k-means label map."""
    fig, ax = plt.subplots(figsize=(img.width / 100.0, img.height / 100.0), dpi=100)
    ax.imshow(img.pixels)
    ax.imshow(label_map, cmap="tab10", alpha=0.45, interpolation="nearest")
    ax.set_axis_off()
    fig.savefig(path, bbox_inches="tight", pad_inches=0.05)
    plt.close(fig)


def save_contour_debug(debug: DebugArtifacts, path: str | Path) -> None:
    """Mask with traced contours and the simplified card quads."""
    mask = debug.segmentation.mask
    fig, ax = plt.subplots(figsize=(mask.width / 100.0, mask.height / 100.0), dpi=100)
    ax.imshow(mask.data, cmap="gray", interpolation="nearest")
    for c in debug.contours:
        ax.plot(c.points[:, 0], c.points[:, 1], color="#2ecc71", linewidth=1)
    for q in debug.quads:
        ax.add_patch(MplPolygon(q.vertices, closed=True, fill=False, edgecolor="#e74c3c", linewidth=2))
    for q in debug.rejected_quads:
        ax.add_patch(
            MplPolygon(q.vertices, closed=True, fill=False, edgecolor="#7f8c8d", linewidth=1, linestyle="--")
        )
    ax.set_axis_off()
    fig.savefig(path, bbox_inches="tight", pad_inches=0.05)
    plt.close(fig)


def write_debug_dir(img: ImageRGB, result: AnalysisResult, out_dir: str | Path) -> None:
    """Dump every pipeline intermediate for one analyzed image."""
    if result.debug is None:
        raise ValueError("result carries no debug artifacts; run with keep_debug=True")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    debug = result.debug
    save_cluster_overlay(img, debug.segmentation.label_map, out / "clusters.png")
    save_image(debug.segmentation.mask, out / "mask.png")
    save_contour_debug(debug, out / "contours.png")
    for i, card in enumerate(debug.cards):
        save_image(card, out / f"card_{i:02d}.png")
    for i, patch in enumerate(debug.patches):
        save_image(patch, out / f"corner_{i:02d}.png")
    save_annotated(img, result, out / "annotated.png")
