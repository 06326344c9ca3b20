import math

import numpy as np
import pytest

from carp.contours import (
    Contour,
    extract_card_quads,
    find_external_contours,
    perimeter,
    polygon_area,
    simplify_rdp,
)
from carp.raster import BinaryMask


def mask_from(rows):
    return BinaryMask(np.array(rows, dtype=np.uint8))


def rect_mask(h, w, y0, x0, rh, rw):
    arr = np.zeros((h, w), dtype=np.uint8)
    arr[y0 : y0 + rh, x0 : x0 + rw] = 1
    return BinaryMask(arr)


class TestFindContours:
    def test_empty_mask(self):
        assert find_external_contours(mask_from(np.zeros((5, 5)))) == []

    def test_filled_rectangle_perimeter(self):
        rh, rw = 14, 20
        contours = find_external_contours(rect_mask(30, 40, 5, 8, rh, rw))
        assert len(contours) == 1
        expect = 2 * (rw - 1) + 2 * (rh - 1)
        assert abs(perimeter(contours[0], closed=True) - expect) <= 2.0

    def test_two_disjoint_squares(self):
        arr = np.zeros((20, 20), dtype=np.uint8)
        arr[2:8, 2:8] = 1
        arr[11:17, 11:17] = 1
        contours = find_external_contours(mask_from(arr))
        assert len(contours) == 2
        # Raster discovery order: top square first.
        assert contours[0].points[:, 1].min() < contours[1].points[:, 1].min()

    def test_single_pixel_and_thin_line(self):
        arr = np.zeros((6, 8), dtype=np.uint8)
        arr[1, 1] = 1
        arr[4, 2:7] = 1
        contours = find_external_contours(mask_from(arr))
        assert len(contours) == 2
        assert len(contours[0]) == 1
        assert len(contours[1]) == 8  # out and back along the line

    def test_hole_border_not_emitted(self):
        arr = np.ones((12, 12), dtype=np.uint8)
        arr[4:8, 4:8] = 0
        contours = find_external_contours(mask_from(arr))
        assert len(contours) == 1
        # Every point on the frame border, none on the hole boundary.
        pts = contours[0].points
        assert ((pts == 0) | (pts == 11)).any(axis=1).all()

    def test_border_points_touch_background(self):
        rng = np.random.default_rng(8)
        for _ in range(5):
            arr = (rng.random((24, 24)) > 0.6).astype(np.uint8)
            mask = mask_from(arr)
            padded = np.pad(arr, 1)
            for c in find_external_contours(mask):
                for x, y in c.points:
                    assert arr[y, x] == 1
                    window = padded[y : y + 3, x : x + 3]
                    assert (window == 0).any()


class TestPerimeter:
    def test_unit_square(self):
        sq = np.array([(0, 0), (1, 0), (1, 1), (0, 1)], dtype=float)
        assert perimeter(sq, closed=True) == pytest.approx(4.0)

    def test_open_hypotenuse(self):
        assert perimeter(np.array([(0, 0), (3, 4)], dtype=float), closed=False) == pytest.approx(5.0)

    def test_hexagon(self):
        pts = [(2 * math.cos(a), 2 * math.sin(a)) for a in np.linspace(0, 2 * math.pi, 7)[:-1]]
        assert perimeter(np.array(pts), closed=True) == pytest.approx(12.0)


def square_with_midpoints(side=50.0):
    return np.array(
        [
            (0, 0), (side / 2, 0), (side, 0), (side, side / 2),
            (side, side), (side / 2, side), (0, side), (0, side / 2),
        ],
        dtype=float,
    )


def random_polygon(rng, n=12, radius=100.0):
    """Simple polygon: jittered radii at sorted angles."""
    angles = np.sort(rng.uniform(0, 2 * math.pi, size=n))
    radii = rng.uniform(0.5, 1.0, size=n) * radius
    return np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])


def point_to_chain_distance(p, chain):
    """Distance from p to the closed polyline through chain vertices."""
    best = math.inf
    n = len(chain)
    for i in range(n):
        a, b = chain[i], chain[(i + 1) % n]
        ab = b - a
        denom = float(ab @ ab)
        t = 0.0 if denom == 0 else max(0.0, min(1.0, float((p - a) @ ab) / denom))
        best = min(best, float(np.hypot(*(a + t * ab - p))))
    return best


class TestRdp:
    def test_square_plus_midpoints(self):
        out = simplify_rdp(square_with_midpoints(), epsilon=1.0)
        assert len(out) == 4
        assert {tuple(v) for v in out.vertices} == {(0, 0), (50, 0), (50, 50), (0, 50)}

    def test_epsilon_zero_keeps_non_collinear(self):
        poly = random_polygon(np.random.default_rng(9))
        out = simplify_rdp(poly, epsilon=0.0)
        assert len(out) == len(poly)
        # Collinear midpoints still drop at epsilon 0.
        assert len(simplify_rdp(square_with_midpoints(), epsilon=0.0)) == 4

    def test_circle_64gon(self):
        angles = np.linspace(0, 2 * math.pi, 65)[:-1]
        poly = np.column_stack([100 * np.cos(angles), 100 * np.sin(angles)])
        eps = 0.02 * perimeter(poly, closed=True)
        out = simplify_rdp(poly, eps)
        assert 4 <= len(out) <= 8

    def test_output_is_subsequence(self):
        rng = np.random.default_rng(10)
        poly = random_polygon(rng, n=20)
        out = simplify_rdp(poly, epsilon=8.0)
        rows = [tuple(v) for v in poly]
        idxs = [rows.index(tuple(v)) for v in out.vertices]
        assert idxs == sorted(idxs)

    def test_dropped_points_within_epsilon_of_chain(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            poly = random_polygon(rng, n=24)
            eps = 6.0
            out = simplify_rdp(poly, eps)
            kept = {tuple(v) for v in out.vertices}
            for p in poly:
                if tuple(p) not in kept:
                    assert point_to_chain_distance(p, out.vertices) <= eps + 1e-9

    def test_idempotent(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            poly = random_polygon(rng, n=int(rng.integers(8, 30)))
            eps = float(rng.uniform(1.0, 20.0))
            once = simplify_rdp(poly, eps)
            twice = simplify_rdp(once, eps)
            assert np.array_equal(once.vertices, twice.vertices)


class TestPolygonArea:
    def test_unit_square(self):
        assert polygon_area(np.array([(0, 0), (1, 0), (1, 1), (0, 1)], float)) == pytest.approx(1.0)

    def test_triangle(self):
        assert polygon_area(np.array([(0, 0), (4, 0), (0, 3)], float)) == pytest.approx(6.0)

    def test_orientation_independent(self):
        tri = np.array([(0, 0), (4, 0), (0, 3)], float)
        assert polygon_area(tri) == polygon_area(tri[::-1])


class TestExtractCardQuads:
    def contour_rect(self, x0, y0, w, h):
        """Pixel border of an axis-aligned rectangle as a contour."""
        pts = []
        for x in range(x0, x0 + w):
            pts.append((x, y0))
        for y in range(y0 + 1, y0 + h):
            pts.append((x0 + w - 1, y))
        for x in range(x0 + w - 2, x0 - 1, -1):
            pts.append((x, y0 + h - 1))
        for y in range(y0 + h - 2, y0, -1):
            pts.append((x0, y))
        return Contour(np.array(pts, dtype=np.int32))

    def test_clean_square(self):
        quads = extract_card_quads([self.contour_rect(2, 2, 30, 30)])
        assert len(quads) == 1 and len(quads[0]) == 4

    def test_small_outlier_dropped(self):
        big = self.contour_rect(0, 0, 200, 280)
        small = self.contour_rect(300, 300, 20, 28)  # 1% of the big area
        quads = extract_card_quads([big, small])
        assert len(quads) == 1
        assert polygon_area(quads[0]) > 10000

    def test_pentagon_rejected(self):
        angles = np.linspace(0, 2 * math.pi, 6)[:-1] - math.pi / 2
        penta = np.column_stack([60 + 40 * np.cos(angles), 60 + 40 * np.sin(angles)])
        steps = []
        for i in range(5):
            a, b = penta[i], penta[(i + 1) % 5]
            for t in np.linspace(0, 1, 30, endpoint=False):
                steps.append(a + t * (b - a))
        contour = Contour(np.array(np.round(steps), dtype=np.int32))
        assert extract_card_quads([contour]) == []

    def test_short_contours_skipped(self):
        c = Contour(np.array([(0, 0), (1, 1), (2, 2)], dtype=np.int32))
        assert extract_card_quads([c]) == []

    def test_result_invariants(self):
        quads = extract_card_quads(
            [self.contour_rect(0, 0, 100, 140), self.contour_rect(150, 10, 60, 80)]
        )
        areas = [polygon_area(q) for q in quads]
        assert all(len(q) == 4 for q in quads)
        assert min(areas) >= 0.10 * max(areas)
