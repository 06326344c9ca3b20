"""Corner ordering, 4-point homography, perspective warp, corner crop.

Every detected quad is warped to an axis-aligned portrait rectangle, then
the rank corner (top-left, proportions tuned for Bicycle-style decks) is
cropped, thresholded, and resized to the standard 28x28 patch that the
classifier consumes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import HomographyError, ImageTooSmallError, InvalidCardAspectError, InvalidQuadError
from .raster import (
    CornerPatch,
    ImageGray,
    ImageRGB,
    _cubic_kernel,
    resize_cubic,
    rgb_to_gray,
    threshold_range,
)

# Portrait card height/width must sit in 1.4 +/- 0.2.
ASPECT_MIN = 1.2
ASPECT_MAX = 1.6

# Rank-corner crop bounds as fractions of card height/width.
CORNER_ROWS = (0.03, 0.15)
CORNER_COLS = (0.01, 0.13)

# Ink threshold: corner pixels with gray value in [0, 125] count as ink.
INK_THRESHOLD = 125

Point = tuple[float, float]


@dataclass(frozen=True)
class Quad:
    """Four card corners in canonical order: tl, tr, br, bl."""

    tl: Point
    tr: Point
    br: Point
    bl: Point

    @property
    def points(self) -> np.ndarray:
        return np.array([self.tl, self.tr, self.br, self.bl], dtype=np.float64)

    @property
    def centroid(self) -> Point:
        p = self.points
        return (float(p[:, 0].mean()), float(p[:, 1].mean()))

    @property
    def diagonal(self) -> float:
        return float(math.dist(self.tl, self.br))


@dataclass(frozen=True, eq=False)
class Homography:
    """3x3 projective map with the last entry normalized to 1."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.ascontiguousarray(self.matrix, dtype=np.float64)
        if m.shape != (3, 3):
            raise HomographyError(f"bad homography shape {m.shape}")
        if abs(m[2, 2]) < 1e-12:
            raise HomographyError("homography not normalizable (h33 ~ 0)")
        m = m / m[2, 2]
        if abs(np.linalg.det(m)) < 1e-12:
            raise HomographyError("homography is singular")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def apply(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        ones = np.ones((pts.shape[0], 1))
        h = (self.matrix @ np.hstack([pts, ones]).T).T
        return h[:, :2] / h[:, 2:3]

    def inverse(self) -> "Homography":
        return Homography(np.linalg.inv(self.matrix))


def order_points(pts) -> Quad:
    """Canonical (tl, tr, br, bl) ordering of four unordered points.

    Sort by x (then y, so ties are permutation-stable); the left pair
    sorted by y gives tl and bl; of the right pair, the point farther
    from tl is br since the diagonal is the longest span.
    """
    p = np.asarray(pts, dtype=np.float64).reshape(4, 2)
    for a in range(4):
        for b in range(a + 1, 4):
            if math.dist(p[a], p[b]) < 1e-9:
                raise InvalidQuadError("duplicate corner points")

    idx = np.lexsort((p[:, 1], p[:, 0]))
    left = p[idx[:2]]
    right = p[idx[2:]]
    left = left[np.argsort(left[:, 1], kind="stable")]
    tl, bl = left[0], left[1]
    d = np.sqrt(((right - tl) ** 2).sum(axis=1))
    br, tr = (right[0], right[1]) if d[0] >= d[1] else (right[1], right[0])

    quad = np.array([tl, tr, br, bl])
    x, y = quad[:, 0], quad[:, 1]
    area = abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))) / 2.0
    if area < 1e-9:
        raise InvalidQuadError("corner points are collinear")
    return Quad(tuple(tl), tuple(tr), tuple(br), tuple(bl))


def quad_dims(q: Quad) -> tuple[int, int]:
    """Output card size: the longer of each opposing edge pair, rounded."""
    width = max(math.dist(q.tl, q.tr), math.dist(q.bl, q.br))
    height = max(math.dist(q.tl, q.bl), math.dist(q.tr, q.br))
    return max(1, int(math.floor(width + 0.5))), max(1, int(math.floor(height + 0.5)))


def solve_homography(src: Quad, dst) -> Homography:
    """Direct linear transform over 4 correspondences with h33 = 1."""
    s = src.points
    d = np.asarray(dst, dtype=np.float64).reshape(4, 2)
    a = np.zeros((8, 8))
    b = np.zeros(8)
    for i in range(4):
        x, y = s[i]
        u, v = d[i]
        a[2 * i] = [x, y, 1, 0, 0, 0, -u * x, -u * y]
        b[2 * i] = u
        a[2 * i + 1] = [0, 0, 0, x, y, 1, -v * x, -v * y]
        b[2 * i + 1] = v
    try:
        h = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise HomographyError(f"degenerate correspondences: {exc}") from exc
    matrix = np.array([[h[0], h[1], h[2]], [h[3], h[4], h[5]], [h[6], h[7], 1.0]])
    hom = Homography(matrix)
    if np.abs(hom.apply(s) - d).max() >= 1e-6:
        raise HomographyError("homography residual exceeds 1e-6")
    return hom


def warp_perspective(img: ImageRGB, h: Homography, out_w: int, out_h: int) -> ImageRGB:
    """Inverse-mapped perspective warp with cubic sampling, clamp-to-edge."""
    if out_w < 1 or out_h < 1:
        raise ValueError(f"bad output size {out_w}x{out_h}")
    hinv = np.linalg.inv(h.matrix)

    xs, ys = np.meshgrid(np.arange(out_w, dtype=np.float64), np.arange(out_h, dtype=np.float64))
    denom = hinv[2, 0] * xs + hinv[2, 1] * ys + hinv[2, 2]
    denom = np.where(np.abs(denom) < 1e-12, 1e-12, denom)
    sx = (hinv[0, 0] * xs + hinv[0, 1] * ys + hinv[0, 2]) / denom
    sy = (hinv[1, 0] * xs + hinv[1, 1] * ys + hinv[1, 2]) / denom

    src = img.pixels.astype(np.float64)
    in_h, in_w = src.shape[:2]
    bx = np.floor(sx).astype(np.int64)
    by = np.floor(sy).astype(np.int64)
    fx = sx - bx
    fy = sy - by

    acc = np.zeros((out_h, out_w, src.shape[2]))
    for ty in range(-1, 3):
        wy = _cubic_kernel(ty - fy)
        iy = np.clip(by + ty, 0, in_h - 1)
        for tx in range(-1, 3):
            wx = _cubic_kernel(tx - fx)
            ix = np.clip(bx + tx, 0, in_w - 1)
            acc += (wy * wx)[..., None] * src[iy, ix]
    return ImageRGB(np.clip(np.floor(acc + 0.5), 0, 255).astype(np.uint8))


def reproject_card(img: ImageRGB, raw_quad) -> tuple[Quad, ImageRGB]:
    """Warp one detected quad to an axis-aligned portrait card.

    Landscape quads (width > height) have the destination corners rolled
    one position so the content rotates 90 degrees; a card that was lying
    rotated to the left comes out upright.  Cards rotated 180 degrees are
    not corrected.
    """
    quad = order_points(raw_quad)
    w, h = quad_dims(quad)
    if w > h:
        out_w, out_h = h, w
        roll = 1
    else:
        out_w, out_h = w, h
        roll = 0
    corners = [(0.0, 0.0), (out_w - 1.0, 0.0), (out_w - 1.0, out_h - 1.0), (0.0, out_h - 1.0)]
    dst = corners[roll:] + corners[:roll]
    hom = solve_homography(quad, dst)
    return quad, warp_perspective(img, hom, out_w, out_h)


def extract_corner(card: ImageRGB) -> CornerPatch:
    """Crop, threshold, and resize the rank corner to 28x28.

    The card must be portrait with height/width in [1.2, 1.6].  The crop
    is rows [0.03h, 0.15h) and columns [0.01w, 0.13w); its gray values in
    [0, 125] become ink, the binary crop is scaled to {0, 255}, and the
    result is cubically resized without re-thresholding.
    """
    h, w = card.height, card.width
    aspect = h / w
    if not ASPECT_MIN <= aspect <= ASPECT_MAX:
        raise InvalidCardAspectError(f"card aspect {aspect:.3f} outside [1.2, 1.6], probably invalid")
    r0, r1 = int(CORNER_ROWS[0] * h), int(CORNER_ROWS[1] * h)
    c0, c1 = int(CORNER_COLS[0] * w), int(CORNER_COLS[1] * w)
    if r1 <= r0 or c1 <= c0:
        raise ImageTooSmallError(f"{w}x{h} card yields an empty corner crop")
    corner = ImageRGB(card.pixels[r0:r1, c0:c1])
    ink = threshold_range(rgb_to_gray(corner), 0, INK_THRESHOLD)
    return resize_cubic(ImageGray(ink.data * np.uint8(255)), 28, 28)
