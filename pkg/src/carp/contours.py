"""Border following, polyline simplification, and card-quad filtering.

Foreground regions use 8-connectivity (background 4), the standard
pairing for border tracing.  Contour points are (x, y) in raster
coordinates and trace the outer border of each region; hole borders are
never emitted.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .raster import BinaryMask

# Clockwise neighbor ring in screen coordinates (y down), starting east.
_DIRS = ((0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1))
_DIR_INDEX = {d: i for i, d in enumerate(_DIRS)}

# Contour simplification epsilon as a fraction of the closed perimeter.
RDP_PERIMETER_FRACTION = 0.02
# Quads smaller than this fraction of the largest quad are outliers.
MIN_AREA_FRACTION = 0.10


@dataclass(frozen=True, eq=False)
class Contour:
    """Closed pixel border; consecutive points are 8-adjacent."""

    points: np.ndarray  # (n, 2) int32, columns (x, y)

    def __post_init__(self) -> None:
        p = np.ascontiguousarray(self.points, dtype=np.int32)
        if p.ndim != 2 or p.shape[1] != 2 or p.shape[0] < 1:
            raise ValueError(f"bad contour shape {p.shape}")
        p.flags.writeable = False
        object.__setattr__(self, "points", p)

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True, eq=False)
class Polygon:
    """Closed polygon with real-valued vertices (x, y)."""

    vertices: np.ndarray  # (n, 2) float64

    def __post_init__(self) -> None:
        v = np.ascontiguousarray(self.vertices, dtype=np.float64)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise ValueError(f"bad polygon shape {v.shape}")
        v.flags.writeable = False
        object.__setattr__(self, "vertices", v)

    def __len__(self) -> int:
        return self.vertices.shape[0]


def _trace_border(grid: np.ndarray, comp: int, start: tuple[int, int]) -> list[tuple[int, int]]:
    """Moore-neighbor border following from the raster-first pixel.

    `start` is (row, col) of the topmost-leftmost pixel, so the cell to
    its west is guaranteed background.  Stops via Jacob's criterion: the
    trace ends when it would leave the start pixel in the same direction
    as the first move.
    """
    h, w = grid.shape

    def is_fg(r: int, c: int) -> bool:
        return 0 <= r < h and 0 <= c < w and grid[r, c] == comp

    contour = [start]
    cur = start
    backtrack = (start[0], start[1] - 1)
    first_move: tuple[tuple[int, int], int] | None = None

    # 4 * area is a safe upper bound on border steps.
    for _ in range(4 * h * w + 8):
        base = _DIR_INDEX[(backtrack[0] - cur[0], backtrack[1] - cur[1])]
        found = None
        last_bg = backtrack
        for step in range(1, 9):
            d = (base + step) % 8
            cell = (cur[0] + _DIRS[d][0], cur[1] + _DIRS[d][1])
            if is_fg(*cell):
                found = (d, cell)
                break
            last_bg = cell
        if found is None:
            break  # isolated pixel
        d, nxt = found
        if first_move is None:
            first_move = (cur, d)
        elif cur == start and (cur, d) == first_move:
            break
        backtrack = last_bg
        cur = nxt
        if nxt != start:
            contour.append(nxt)
    return contour


def find_external_contours(mask: BinaryMask) -> list[Contour]:
    """One outer-border contour per connected foreground region.

    Regions are discovered in raster-scan order; hole borders are not
    emitted.
    """
    data = mask.data
    labeled, count = ndimage.label(data, structure=np.ones((3, 3), dtype=np.uint8))
    if count == 0:
        return []

    flat = labeled.ravel()
    comp_ids, first_idx = np.unique(flat, return_index=True)
    order = [(idx, comp) for comp, idx in zip(comp_ids, first_idx) if comp != 0]
    order.sort()

    w = data.shape[1]
    contours = []
    for idx, comp in order:
        start = (idx // w, idx % w)
        path = _trace_border(labeled, comp, start)
        pts = np.array([(c, r) for r, c in path], dtype=np.int32)
        contours.append(Contour(pts))
    return contours


def _as_points(c) -> np.ndarray:
    if isinstance(c, Contour):
        return c.points.astype(np.float64)
    if isinstance(c, Polygon):
        return c.vertices
    return np.asarray(c, dtype=np.float64)


def perimeter(c, closed: bool = True) -> float:
    """Sum of Euclidean segment lengths; includes the closing segment when closed."""
    pts = _as_points(c)
    if pts.shape[0] < 2:
        raise ValueError("perimeter needs at least 2 points")
    seg = np.sqrt(((pts[1:] - pts[:-1]) ** 2).sum(axis=1)).sum()
    if closed:
        seg += float(np.sqrt(((pts[0] - pts[-1]) ** 2).sum()))
    return float(seg)


def _perp_distances(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Perpendicular distance of each point from the line through a and b."""
    ab = b - a
    norm = float(np.hypot(ab[0], ab[1]))
    if norm < 1e-12:
        return np.sqrt(((pts - a) ** 2).sum(axis=1))
    cross = (pts[:, 0] - a[0]) * ab[1] - (pts[:, 1] - a[1]) * ab[0]
    return np.abs(cross) / norm


def _rdp_keep(pts: np.ndarray, idxs: np.ndarray, keep: np.ndarray, epsilon: float) -> None:
    """Iterative RDP over one open chain given by vertex indices."""
    stack = [(0, len(idxs) - 1)]
    while stack:
        lo, hi = stack.pop()
        if hi - lo < 2:
            continue
        sub = idxs[lo + 1 : hi]
        dists = _perp_distances(pts[sub], pts[idxs[lo]], pts[idxs[hi]])
        m = int(np.argmax(dists))
        if dists[m] > epsilon:
            keep[sub[m]] = True
            mid = lo + 1 + m
            stack.append((lo, mid))
            stack.append((mid, hi))


def simplify_rdp(points, epsilon: float) -> Polygon:
    """Ramer-Douglas-Peucker on a closed curve.

    The recursion is anchored at the two mutually farthest vertices; the
    two arcs between them are simplified independently.  Output vertices
    are a subsequence of the input in its original cyclic order.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    pts = _as_points(points)
    n = pts.shape[0]
    if n < 3:
        raise ValueError("simplify_rdp needs at least 3 vertices")

    diff = pts[:, None, :] - pts[None, :, :]
    d2 = (diff * diff).sum(axis=2)
    i, j = np.unravel_index(int(np.argmax(d2)), d2.shape)
    if i > j:
        i, j = j, i

    keep = np.zeros(n, dtype=bool)
    keep[i] = keep[j] = True
    arc_a = np.arange(i, j + 1)
    arc_b = np.concatenate([np.arange(j, n), np.arange(0, i + 1)])
    _rdp_keep(pts, arc_a, keep, epsilon)
    _rdp_keep(pts, arc_b, keep, epsilon)

    if keep.sum() < 3:
        # Degenerate (near-collinear) curve; fall back to the anchors plus
        # the farthest not-yet-kept vertex so the result is still a polygon.
        extra = _perp_distances(pts, pts[i], pts[j])
        extra[keep] = -1.0
        keep[int(np.argmax(extra))] = True
    return Polygon(pts[np.flatnonzero(keep)])


def polygon_area(p) -> float:
    """Absolute shoelace area."""
    v = _as_points(p)
    if v.shape[0] < 3:
        raise ValueError("polygon_area needs at least 3 vertices")
    x, y = v[:, 0], v[:, 1]
    return float(abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))) / 2.0)


def extract_card_quads(contours: list[Contour]) -> list[Polygon]:
    """Simplify contours and keep card-like quadrilaterals.

    Each contour is simplified with epsilon = 0.02 x its closed
    perimeter; only 4-vertex results survive, and quads smaller than 10%
    of the largest quad's area are discarded as outliers.  Discovery
    order is preserved.
    """
    quads = []
    for c in contours:
        if len(c) < 4:
            continue
        eps = RDP_PERIMETER_FRACTION * perimeter(c, closed=True)
        simplified = simplify_rdp(c, eps)
        if len(simplified) == 4:
            quads.append(simplified)
    if not quads:
        return []
    areas = [polygon_area(q) for q in quads]
    cutoff = MIN_AREA_FRACTION * max(areas)
    return [q for q, a in zip(quads, areas) if a >= cutoff]
