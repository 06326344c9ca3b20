"""End-to-end analysis: segmentation, contours, reprojection, KNN, advice.

This is the orchestration layer behind both the CLI and the HTTP
service.  Results serialize to a stable JSON schema: quads as four
[x, y] pairs in tl/tr/br/bl order, neighbor distances rounded to 4
decimals, stage timings in milliseconds.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

from .classify import KnnModel, compute_hog, knn_predict
from .contours import Contour, Polygon, extract_card_quads, find_external_contours, polygon_area
from .errors import ImageTooSmallError, InvalidCardAspectError, NotARankError, UpcardNotVisibleError
from .raster import CornerPatch, ImageRGB
from .reproject import Quad, extract_corner, reproject_card
from .segmentation import KMeansParams, Segmentation, segment_cards
from .strategy import Hand, Move, assign_roles, dealer_upcard, move_from_slug, normalize_rank, recommend

# A "card" covering nearly the whole frame is the background cluster
# winning on an empty table, not a card.
MAX_FRAME_FRACTION = 0.95

ROLES = ("player", "dealer", "unassigned")


@dataclass(frozen=True)
class CardDetection:
    quad: Quad
    label: str
    neighbor_distances: tuple[float, ...]
    role: str = "unassigned"

    def to_dict(self) -> dict:
        return {
            "quad": [list(p) for p in (self.quad.tl, self.quad.tr, self.quad.br, self.quad.bl)],
            "label": self.label,
            "neighbor_distances": list(self.neighbor_distances),
            "role": self.role,
        }

    @staticmethod
    def from_dict(d: dict) -> "CardDetection":
        q = [tuple(float(v) for v in p) for p in d["quad"]]
        return CardDetection(
            quad=Quad(q[0], q[1], q[2], q[3]),
            label=d["label"],
            neighbor_distances=tuple(float(x) for x in d["neighbor_distances"]),
            role=d["role"],
        )


@dataclass(frozen=True, eq=False)
class DebugArtifacts:
    """Intermediate products kept around for --debug-dir dumps."""

    segmentation: Segmentation
    contours: list[Contour]
    quads: list[Polygon]
    cards: list[ImageRGB]
    patches: list[CornerPatch]
    rejected_quads: list[Polygon]


@dataclass(frozen=True)
class AnalysisResult:
    detections: tuple[CardDetection, ...]
    player_hand: tuple[str, ...]
    dealer_upcard: str | None
    recommendation: Move | None
    timings_ms: tuple[tuple[str, float], ...]
    debug: DebugArtifacts | None = field(default=None, compare=False, repr=False)

    def to_dict(self) -> dict:
        rec = None
        if self.recommendation is not None:
            rec = {"move": self.recommendation.slug, "display": self.recommendation.display}
        return {
            "detections": [d.to_dict() for d in self.detections],
            "player_hand": list(self.player_hand),
            "dealer_upcard": self.dealer_upcard,
            "recommendation": rec,
            "timings_ms": {name: ms for name, ms in self.timings_ms},
        }

    @staticmethod
    def from_dict(d: dict) -> "AnalysisResult":
        rec = d.get("recommendation")
        return AnalysisResult(
            detections=tuple(CardDetection.from_dict(x) for x in d["detections"]),
            player_hand=tuple(d["player_hand"]),
            dealer_upcard=d["dealer_upcard"],
            recommendation=move_from_slug(rec["move"]) if rec else None,
            timings_ms=tuple((k, float(v)) for k, v in d["timings_ms"].items()),
        )


def detect_cards(
    img: ImageRGB,
    model: KnnModel,
    kmeans_params: KMeansParams | None = None,
    keep_debug: bool = False,
) -> AnalysisResult:
    """Detection-only pass: segmentation through classification.

    Quads that fail the card aspect check or produce an empty corner
    crop are dropped (they were not cards); a quad covering 95% or more
    of the frame is the background cluster and is dropped too.
    """
    timings = []
    t0 = time.perf_counter()
    seg = segment_cards(img, kmeans_params)
    t1 = time.perf_counter()
    timings.append(("segmentation", round((t1 - t0) * 1000.0, 3)))

    contours = find_external_contours(seg.mask)
    quads = extract_card_quads(contours)
    frame_limit = MAX_FRAME_FRACTION * img.width * img.height
    quads = [q for q in quads if polygon_area(q) < frame_limit]
    t2 = time.perf_counter()
    timings.append(("contours", round((t2 - t1) * 1000.0, 3)))

    cards: list[tuple[Quad, ImageRGB]] = []
    rejected: list[Polygon] = []
    kept_polys: list[Polygon] = []
    patches: list[CornerPatch] = []
    for poly in quads:
        quad, card = reproject_card(img, poly.vertices)
        try:
            patch = extract_corner(card)
        except (InvalidCardAspectError, ImageTooSmallError):
            rejected.append(poly)
            continue
        cards.append((quad, card))
        kept_polys.append(poly)
        patches.append(patch)
    t3 = time.perf_counter()
    timings.append(("reprojection", round((t3 - t2) * 1000.0, 3)))

    detections = []
    for (quad, _), patch in zip(cards, patches):
        label, dists = knn_predict(model, compute_hog(patch, model.hog_params))
        detections.append(
            CardDetection(
                quad=quad,
                label=label,
                neighbor_distances=tuple(round(float(x), 4) for x in dists),
            )
        )
    t4 = time.perf_counter()
    timings.append(("classification", round((t4 - t3) * 1000.0, 3)))

    debug = None
    if keep_debug:
        debug = DebugArtifacts(
            segmentation=seg,
            contours=contours,
            quads=kept_polys,
            cards=[c for _, c in cards],
            patches=patches,
            rejected_quads=rejected,
        )
    return AnalysisResult(
        detections=tuple(detections),
        player_hand=(),
        dealer_upcard=None,
        recommendation=None,
        timings_ms=tuple(timings),
        debug=debug,
    )


def analyze(
    img: ImageRGB,
    model: KnnModel,
    kmeans_params: KMeansParams | None = None,
    split_fraction: float | None = None,
    keep_debug: bool = False,
) -> AnalysisResult:
    """Full advisory pass: detect, assign roles, recommend.

    The recommendation is present exactly when the player area holds two
    or more rank cards and a dealer upcard is visible.
    """
    result = detect_cards(img, model, kmeans_params, keep_debug=keep_debug)
    t0 = time.perf_counter()

    centroid_ys = [d.quad.centroid[1] for d in result.detections]
    player_idx, dealer_idx = assign_roles(centroid_ys, img.height, split_fraction)
    detections = list(result.detections)
    for i in player_idx:
        detections[i] = replace(detections[i], role="player")
    for i in dealer_idx:
        detections[i] = replace(detections[i], role="dealer")

    player_labels = [detections[i].label for i in player_idx]
    dealer_labels = [detections[i].label for i in dealer_idx]

    player_hand = []
    hand_valid = True
    for label in player_labels:
        try:
            player_hand.append(normalize_rank(label))
        except NotARankError:
            player_hand.append(label)
            hand_valid = False

    upcard = None
    if dealer_labels:
        try:
            upcard = dealer_upcard(dealer_labels)
        except UpcardNotVisibleError:
            upcard = None

    move = None
    if hand_valid and len(player_hand) >= 2 and upcard is not None:
        move = recommend(Hand(player_hand), upcard)
    timings = result.timings_ms + (("strategy", round((time.perf_counter() - t0) * 1000.0, 3)),)

    return AnalysisResult(
        detections=tuple(detections),
        player_hand=tuple(player_hand),
        dealer_upcard=upcard,
        recommendation=move,
        timings_ms=timings,
        debug=result.debug,
    )
