"""Synthetic card-scene renderer and training-corpus builder.

Scenes are white rounded-rectangle cards with red ink (rank glyphs,
pips, card-back stripes) over a dark felt background, so a k=3
clustering has exactly the three color families it expects.  Every card
is placed by an exact homography, which makes the returned ground truth
(quads, labels, roles) correct by construction.

Rotations are counterclockwise on screen; within [0, 45] degrees the
reprojection stage recovers every card upright.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import SceneSpecError
from .raster import BinaryMask, CornerPatch, ImageRGB, save_image
from .reproject import Quad, extract_corner, order_points, reproject_card, solve_homography
from .classify import CARD_LABELS

FELT_GREEN = (0, 94, 48)
CARD_WHITE = (255, 255, 255)
INK_RED = (170, 20, 30)  # gray value ~66, safely below the 125 ink threshold

CARD_ASPECT = 1.4  # portrait height / width
# Rounded corners pull the simplified quad inward by about 0.41 * radius,
# so the radius stays small enough to keep corner error under ~3 px.
CORNER_RADIUS_FRACTION = 0.04

# Rank glyphs on a 5x7 grid ("10" is composed from "1" and "0").
_GLYPH_ROWS = {
    "2": (".###.", "#...#", "....#", "..##.", ".#...", "#....", "#####"),
    "3": ("####.", "....#", "....#", ".###.", "....#", "....#", "####."),
    "4": ("...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."),
    "5": ("#####", "#....", "####.", "....#", "....#", "#...#", ".###."),
    "6": (".###.", "#....", "#....", "####.", "#...#", "#...#", ".###."),
    "7": ("#####", "....#", "...#.", "..#..", "..#..", ".#...", ".#..."),
    "8": (".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."),
    "9": (".###.", "#...#", "#...#", ".####", "....#", "....#", ".###."),
    "J": ("..###", "...#.", "...#.", "...#.", "...#.", "#..#.", ".##.."),
    "Q": (".###.", "#...#", "#...#", "#...#", "#.#.#", "#..#.", ".##.#"),
    "K": ("#...#", "#..#.", "#.#..", "##...", "#.#..", "#..#.", "#...#"),
    "A": ("..#..", ".#.#.", "#...#", "#####", "#...#", "#...#", "#...#"),
    "1": ("..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###."),
    "0": (".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
}


def _glyph_grid(label: str) -> np.ndarray:
    if label == "10":
        one = _glyph_grid("1")
        zero = _glyph_grid("0")
        gap = np.zeros((7, 1), dtype=bool)
        return np.hstack([one, gap, zero])
    rows = _GLYPH_ROWS[label]
    return np.array([[ch == "#" for ch in row] for row in rows], dtype=bool)


@dataclass(frozen=True)
class CardPlacement:
    label: str
    center: tuple[float, float]
    width: float
    angle_deg: float = 0.0  # counterclockwise on screen
    role: str = "unassigned"  # player | dealer | unassigned
    corner_jitter: float = 0.0  # perspective wobble, pixels per corner

    @property
    def height(self) -> float:
        return self.width * CARD_ASPECT


@dataclass(frozen=True)
class SceneSpec:
    width: int
    height: int
    cards: tuple[CardPlacement, ...]
    background: tuple[int, int, int] = FELT_GREEN
    noise_sigma: float = 0.0
    seed: int = 0
    antialias: bool = True  # False renders hard edges (every pixel a pure color)


@dataclass(frozen=True)
class GroundTruthCard:
    quad: Quad
    label: str
    role: str


@dataclass(frozen=True, eq=False)
class SyntheticScene:
    image: ImageRGB
    ground_truth: tuple[GroundTruthCard, ...]
    seed: int
    white_mask: BinaryMask  # card stock only, ink excluded
    card_mask: BinaryMask  # full card footprint
    spec: SceneSpec


def _rotate(points: np.ndarray, center: tuple[float, float], angle_deg: float) -> np.ndarray:
    """Rotate counterclockwise on screen (y grows downward)."""
    a = np.radians(angle_deg)
    c, s = np.cos(a), np.sin(a)
    rel = points - np.asarray(center)
    return np.column_stack(
        [rel[:, 0] * c + rel[:, 1] * s, -rel[:, 0] * s + rel[:, 1] * c]
    ) + np.asarray(center)


def card_scene_corners(card: CardPlacement, rng: np.random.Generator | None = None) -> np.ndarray:
    """Physical scene positions of (tl, tr, br, bl) for one placement."""
    w, h = card.width, card.height
    cx, cy = card.center
    rect = np.array(
        [[cx - w / 2, cy - h / 2], [cx + w / 2, cy - h / 2], [cx + w / 2, cy + h / 2], [cx - w / 2, cy + h / 2]]
    )
    corners = _rotate(rect, card.center, card.angle_deg)
    if card.corner_jitter > 0:
        if rng is None:
            rng = np.random.default_rng(0)
        corners = corners + rng.uniform(-card.corner_jitter, card.corner_jitter, size=(4, 2))
    return corners


def _quads_overlap(a: np.ndarray, b: np.ndarray, margin: float = 1.0) -> bool:
    """Separating-axis test on two convex quads; margin widens both."""
    for quad in (a, b):
        for i in range(4):
            edge = quad[(i + 1) % 4] - quad[i]
            axis = np.array([-edge[1], edge[0]])
            norm = np.hypot(axis[0], axis[1])
            if norm < 1e-9:
                continue
            axis = axis / norm
            pa, pb = a @ axis, b @ axis
            if pa.max() + margin <= pb.min() or pb.max() + margin <= pa.min():
                return False
    return True


def _card_texture(label: str, u: np.ndarray, v: np.ndarray, w: float, h: float):
    """Evaluate card-space samples: (inside, ink) boolean arrays."""
    r = CORNER_RADIUS_FRACTION * w
    dx = np.maximum(np.abs(u - w / 2) - (w / 2 - r), 0.0)
    dy = np.maximum(np.abs(v - h / 2) - (h / 2 - r), 0.0)
    inside = dx * dx + dy * dy <= r * r

    if label == "BACK":
        band = (u >= 0.06 * w) & (u <= 0.94 * w) & (v >= 0.06 * h) & (v <= 0.94 * h)
        stripes = np.mod(u + v, w / 6.0) < w / 16.0
        ink = band & stripes
    else:
        grid = _glyph_grid(label)
        rows, cols = grid.shape
        # The two-digit "10" gets the full crop width to stay legible.
        gx0, gx1 = (0.015 * w, 0.125 * w) if label == "10" else (0.025 * w, 0.115 * w)
        gy0, gy1 = 0.045 * h, 0.135 * h
        cu = (u - gx0) / (gx1 - gx0) * cols
        cv = (v - gy0) / (gy1 - gy0) * rows
        valid = (cu >= 0) & (cu < cols) & (cv >= 0) & (cv < rows)
        iu = np.clip(cu.astype(np.int64), 0, cols - 1)
        iv = np.clip(cv.astype(np.int64), 0, rows - 1)
        ink = valid & grid[iv, iu]

        # Center pips give every scene a red cluster of its own.
        for py in (0.42, 0.58):
            du = np.abs(u - 0.5 * w) / (0.07 * w)
            dv = np.abs(v - py * h) / (0.05 * h)
            ink |= du + dv <= 1.0

    return inside, inside & ink


def render_scene(spec: SceneSpec) -> SyntheticScene:
    """Rasterize a scene spec with 2x2 supersampling.

    Bit-identical for a fixed spec (including seed).  Raises
    SceneSpecError when a card leaves the frame or two cards overlap.
    """
    rng = np.random.default_rng(spec.seed)
    height, width = spec.height, spec.width

    corner_sets = [card_scene_corners(card, rng) for card in spec.cards]
    for corners, card in zip(corner_sets, spec.cards):
        if (
            corners[:, 0].min() < 1
            or corners[:, 1].min() < 1
            or corners[:, 0].max() > width - 2
            or corners[:, 1].max() > height - 2
        ):
            raise SceneSpecError(f"card {card.label} at {card.center} leaves the frame")
    for i in range(len(corner_sets)):
        for j in range(i + 1, len(corner_sets)):
            if _quads_overlap(corner_sets[i], corner_sets[j]):
                raise SceneSpecError(
                    f"cards {spec.cards[i].label} and {spec.cards[j].label} overlap"
                )

    canvas = np.empty((height, width, 3), dtype=np.float64)
    canvas[:] = np.asarray(spec.background, dtype=np.float64)
    white_cov = np.zeros((height, width))
    card_cov = np.zeros((height, width))

    offsets = (-0.25, 0.25) if spec.antialias else (0.0,)
    truths = []
    for card, corners in zip(spec.cards, corner_sets):
        w, h = card.width, card.height
        src = Quad((0.0, 0.0), (w, 0.0), (w, h), (0.0, h))
        hom = solve_homography(src, corners)
        inv = np.linalg.inv(hom.matrix)

        x0 = max(0, int(np.floor(corners[:, 0].min())) - 1)
        x1 = min(width, int(np.ceil(corners[:, 0].max())) + 2)
        y0 = max(0, int(np.floor(corners[:, 1].min())) - 1)
        y1 = min(height, int(np.ceil(corners[:, 1].max())) + 2)
        xs, ys = np.meshgrid(np.arange(x0, x1, dtype=np.float64), np.arange(y0, y1, dtype=np.float64))

        cov = np.zeros(xs.shape)
        white = np.zeros(xs.shape)
        ink_cov = np.zeros(xs.shape)
        n_samples = len(offsets) ** 2
        for oy in offsets:
            for ox in offsets:
                sx, sy = xs + ox, ys + oy
                denom = inv[2, 0] * sx + inv[2, 1] * sy + inv[2, 2]
                u = (inv[0, 0] * sx + inv[0, 1] * sy + inv[0, 2]) / denom
                v = (inv[1, 0] * sx + inv[1, 1] * sy + inv[1, 2]) / denom
                inside, ink = _card_texture(card.label, u, v, w, h)
                cov += inside
                ink_cov += ink
                white += inside & ~ink
        cov /= n_samples
        ink_cov /= n_samples
        white /= n_samples

        region = canvas[y0:y1, x0:x1]
        stock = (cov - ink_cov)[..., None] * np.asarray(CARD_WHITE, dtype=np.float64)
        inkcol = ink_cov[..., None] * np.asarray(INK_RED, dtype=np.float64)
        canvas[y0:y1, x0:x1] = region * (1.0 - cov[..., None]) + stock + inkcol
        white_cov[y0:y1, x0:x1] += white
        card_cov[y0:y1, x0:x1] += cov

        truths.append(
            GroundTruthCard(quad=order_points(corners), label=card.label, role=card.role)
        )

    if spec.noise_sigma > 0:
        canvas = canvas + rng.normal(0.0, spec.noise_sigma, canvas.shape)

    image = ImageRGB(np.clip(np.floor(canvas + 0.5), 0, 255).astype(np.uint8))
    return SyntheticScene(
        image=image,
        ground_truth=tuple(truths),
        seed=spec.seed,
        white_mask=BinaryMask((white_cov >= 0.5).astype(np.uint8)),
        card_mask=BinaryMask((card_cov >= 0.5).astype(np.uint8)),
        spec=spec,
    )


# ---------------------------------------------------------------------------
# Scene generators


def random_scene(
    seed: int,
    n_cards: int | None = None,
    size: tuple[int, int] = (660, 440),
    rotation_range: tuple[float, float] = (0.0, 45.0),
    labels: tuple[str, ...] = CARD_LABELS,
    noise_sigma: float = 0.0,
) -> SceneSpec:
    """Non-overlapping cards on a jittered 3x2 grid; top row is the dealer's."""
    rng = np.random.default_rng(seed)
    width, height = size
    cols, rows = 3, 2
    cell_w, cell_h = width / cols, height / rows

    if n_cards is None:
        n_cards = int(rng.integers(2, 7))
    if not 1 <= n_cards <= cols * rows:
        raise SceneSpecError(f"cannot place {n_cards} cards on a {cols}x{rows} grid")

    # Largest rotated bounding box is (w + h)/sqrt(2), h = 1.4 w.
    margin = 8.0
    max_w = (min(cell_w, cell_h) - 2 * margin) / (2.4 / np.sqrt(2.0))
    cells = rng.permutation(cols * rows)[:n_cards]
    cards = []
    for cell in sorted(int(c) for c in cells):
        cy, cx = divmod(cell, cols)
        w = float(rng.uniform(0.82, 1.0) * max_w)
        h = w * CARD_ASPECT
        angle = float(rng.uniform(*rotation_range))
        bbox_w = w * abs(np.cos(np.radians(angle))) + h * abs(np.sin(np.radians(angle)))
        bbox_h = w * abs(np.sin(np.radians(angle))) + h * abs(np.cos(np.radians(angle)))
        slack_x = max(0.0, (cell_w - bbox_w) / 2 - margin)
        slack_y = max(0.0, (cell_h - bbox_h) / 2 - margin)
        center = (
            float((cx + 0.5) * cell_w + rng.uniform(-slack_x, slack_x)),
            float((cy + 0.5) * cell_h + rng.uniform(-slack_y, slack_y)),
        )
        label = str(rng.choice(labels))
        role = "dealer" if cy == 0 else "player"
        cards.append(CardPlacement(label=label, center=center, width=w, angle_deg=angle, role=role))
    return SceneSpec(
        width=width, height=height, cards=tuple(cards), noise_sigma=noise_sigma, seed=seed
    )


def random_scenes(count: int, seed: int, **kwargs) -> list[SceneSpec]:
    rng = np.random.default_rng(seed)
    child_seeds = rng.integers(0, 2**31, size=count)
    return [random_scene(int(s), **kwargs) for s in child_seeds]


def blackjack_scene(
    player_labels,
    dealer_labels,
    seed: int = 0,
    size: tuple[int, int] = (512, 384),
    rotation_range: tuple[float, float] = (0.0, 25.0),
    noise_sigma: float = 0.0,
) -> SceneSpec:
    """Dealt layout: dealer cards across the top row, player across the bottom."""
    rng = np.random.default_rng(seed)
    width, height = size
    rows = [(dealer_labels, 0.25, "dealer"), (player_labels, 0.75, "player")]
    n_max = max(len(dealer_labels), len(player_labels), 1)
    cell_w = width / max(n_max, 2)
    w = min((cell_w - 16) / (2.4 / np.sqrt(2.0)), height * 0.42 / 2.4 * np.sqrt(2.0))
    cards = []
    for labels, fy, role in rows:
        n = len(labels)
        for i, label in enumerate(labels):
            cx = width * (i + 0.5) / n if n else 0
            angle = float(rng.uniform(*rotation_range))
            cards.append(
                CardPlacement(
                    label=label, center=(cx, fy * height), width=float(w), angle_deg=angle, role=role
                )
            )
    return SceneSpec(width=width, height=height, cards=tuple(cards), noise_sigma=noise_sigma, seed=seed)


# ---------------------------------------------------------------------------
# Training corpus

TRAIN_WIDTHS = (98.0, 108.0, 118.0)
TRAIN_ANGLES = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0, 45.0)


def training_patch(label: str, width: float, angle_deg: float, seed: int) -> CornerPatch:
    """Render one card alone and extract its corner through the real detector.

    Running segmentation, contour tracing, and quad simplification on the
    rendered card gives training patches the same corner placement error
    (the simplified quad sits slightly inside the rounded corners) and
    resampling blur that detected cards carry at analysis time.
    """
    from .contours import extract_card_quads, find_external_contours
    from .segmentation import segment_cards

    h = width * CARD_ASPECT
    a = np.radians(angle_deg)
    bw = width * abs(np.cos(a)) + h * abs(np.sin(a))
    bh = width * abs(np.sin(a)) + h * abs(np.cos(a))
    scene_w, scene_h = int(np.ceil(bw)) + 24, int(np.ceil(bh)) + 24
    card = CardPlacement(
        label=label, center=(scene_w / 2, scene_h / 2), width=width, angle_deg=angle_deg
    )
    scene = render_scene(SceneSpec(width=scene_w, height=scene_h, cards=(card,), seed=seed))

    quads = extract_card_quads(find_external_contours(segment_cards(scene.image).mask))
    if quads:
        corners = quads[0].vertices
    else:  # pragma: no cover - detection cannot fail on a lone clean card
        corners = scene.ground_truth[0].quad.points
    _, portrait = reproject_card(scene.image, corners)
    return extract_corner(portrait)


def make_training_dir(
    out_dir: str | Path,
    seed: int = 0,
    widths: tuple[float, ...] = TRAIN_WIDTHS,
    angles: tuple[float, ...] = TRAIN_ANGLES,
) -> Path:
    """Write a `<index>-<label>/` patch corpus for every card label."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for idx, label in enumerate(CARD_LABELS):
        sub = out / f"{idx:02d}-{label}"
        sub.mkdir(exist_ok=True)
        n = 0
        for width in widths:
            for angle in angles:
                patch = training_patch(label, width, angle, seed=seed + 7919 * idx + n)
                save_image(patch, sub / f"{n:03d}.png")
                n += 1
    return out


# ---------------------------------------------------------------------------
# Scene persistence (CLI `synth` output)


def save_scene(scene: SyntheticScene, out_dir: str | Path, stem: str) -> tuple[Path, Path]:
    """Write `<stem>.png` and a `<stem>.json` ground-truth sidecar."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    png = out / f"{stem}.png"
    sidecar = out / f"{stem}.json"
    save_image(scene.image, png)
    payload = {
        "image": png.name,
        "seed": scene.seed,
        "cards": [
            {
                "label": t.label,
                "role": t.role,
                "quad": [list(p) for p in (t.quad.tl, t.quad.tr, t.quad.br, t.quad.bl)],
            }
            for t in scene.ground_truth
        ],
    }
    sidecar.write_text(json.dumps(payload, indent=2))
    return png, sidecar
