"""Image containers and pixel-level primitives.

All images are 8-bit and row-major.  Raster coordinates: origin at the
top-left corner, x growing rightward, y growing downward.  Containers are
immutable once constructed (the backing arrays are marked read-only), so
they are safe to share across threads.
"""
from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import InvalidImageError

# Keys cubic-convolution kernel parameter. -0.75 is the common imaging
# library default, so resampled values line up with files produced there.
CUBIC_A = -0.75

# ITU-R BT.601 luma weights.
_LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class ImageRGB:
    """height x width x 3 uint8 pixels."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        p = np.ascontiguousarray(self.pixels, dtype=np.uint8)
        if p.ndim != 3 or p.shape[2] != 3 or p.shape[0] < 1 or p.shape[1] < 1:
            raise InvalidImageError(f"expected HxWx3 pixels, got shape {p.shape}")
        object.__setattr__(self, "pixels", _freeze(p))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True, eq=False)
class ImageGray:
    """height x width uint8 intensities."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        p = np.ascontiguousarray(self.pixels, dtype=np.uint8)
        if p.ndim != 2 or p.shape[0] < 1 or p.shape[1] < 1:
            raise InvalidImageError(f"expected HxW pixels, got shape {p.shape}")
        object.__setattr__(self, "pixels", _freeze(p))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """height x width values restricted to {0, 1}."""

    data: np.ndarray

    def __post_init__(self) -> None:
        d = np.ascontiguousarray(self.data, dtype=np.uint8)
        if d.ndim != 2 or d.shape[0] < 1 or d.shape[1] < 1:
            raise InvalidImageError(f"expected HxW mask, got shape {d.shape}")
        if d.max(initial=0) > 1:
            raise InvalidImageError("mask values must be 0 or 1")
        object.__setattr__(self, "data", _freeze(d))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]


# A corner patch is just a 28x28 grayscale image; kept as an alias so call
# sites can state their intent.
CornerPatch = ImageGray


def rgb_to_gray(img: ImageRGB) -> ImageGray:
    """BT.601 luma conversion, rounded half-up."""
    luma = img.pixels.astype(np.float64) @ _LUMA_WEIGHTS
    return ImageGray(np.clip(np.floor(luma + 0.5), 0, 255).astype(np.uint8))


def rgb_to_hsv(img: ImageRGB) -> np.ndarray:
    """Hexcone HSV in the 8-bit convention: H in [0,179], S and V in [0,255].

    Returns a height x width x 3 uint8 array with channels (H, S, V).
    """
    rgb = img.pixels.astype(np.float64)
    v = rgb.max(axis=2)
    mn = rgb.min(axis=2)
    delta = v - mn

    s = np.zeros_like(v)
    nz = v > 0
    s[nz] = 255.0 * delta[nz] / v[nz]

    h = np.zeros_like(v)
    d = delta > 0
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    is_r = d & (v == r)
    is_g = d & ~is_r & (v == g)
    is_b = d & ~is_r & ~is_g
    h[is_r] = 60.0 * (g[is_r] - b[is_r]) / delta[is_r]
    h[is_g] = 120.0 + 60.0 * (b[is_g] - r[is_g]) / delta[is_g]
    h[is_b] = 240.0 + 60.0 * (r[is_b] - g[is_b]) / delta[is_b]
    h = np.mod(h, 360.0) / 2.0

    out = np.empty(img.pixels.shape, dtype=np.uint8)
    out[..., 0] = np.mod(np.floor(h + 0.5), 180.0).astype(np.uint8)
    out[..., 1] = np.clip(np.floor(s + 0.5), 0, 255).astype(np.uint8)
    out[..., 2] = v.astype(np.uint8)
    return out


def threshold_range(img: ImageGray, lo: int, hi: int) -> BinaryMask:
    """1 where lo <= pixel <= hi (both ends inclusive), else 0."""
    if not 0 <= lo <= hi <= 255:
        raise ValueError(f"bad threshold range [{lo}, {hi}]")
    p = img.pixels
    return BinaryMask(((p >= lo) & (p <= hi)).astype(np.uint8))


def _cubic_kernel(s: np.ndarray, a: float = CUBIC_A) -> np.ndarray:
    s = np.abs(s)
    out = np.zeros_like(s)
    m = s <= 1.0
    out[m] = ((a + 2.0) * s[m] - (a + 3.0)) * s[m] ** 2 + 1.0
    m = (s > 1.0) & (s < 2.0)
    out[m] = a * (((s[m] - 5.0) * s[m] + 8.0) * s[m] - 4.0)
    return out


def _resample_axis(data: np.ndarray, new_len: int, axis: int) -> np.ndarray:
    """4-tap cubic-convolution resample along one axis, clamp-to-edge."""
    old_len = data.shape[axis]
    scale = old_len / new_len
    coords = (np.arange(new_len) + 0.5) * scale - 0.5
    base = np.floor(coords).astype(np.int64)
    frac = coords - base

    shape = [1] * data.ndim
    shape[axis] = new_len
    out = None
    for t in range(-1, 3):
        idx = np.clip(base + t, 0, old_len - 1)
        w = _cubic_kernel(t - frac).reshape(shape)
        term = w * np.take(data, idx, axis=axis)
        out = term if out is None else out + term
    return out


def resize_cubic(img: ImageRGB | ImageGray, new_w: int, new_h: int):
    """Cubic-convolution resize (kernel a = -0.75), pixel centers aligned.

    Returns the same container kind as the input.  A same-size resize is
    exactly the identity.
    """
    if new_w < 1 or new_h < 1:
        raise ValueError(f"bad target size {new_w}x{new_h}")
    data = img.pixels.astype(np.float64)
    data = _resample_axis(data, new_h, axis=0)
    data = _resample_axis(data, new_w, axis=1)
    data = np.clip(np.floor(data + 0.5), 0, 255).astype(np.uint8)
    return type(img)(data)


# ---------------------------------------------------------------------------
# PNG / JPEG codec plumbing


def load_image(path: str | Path) -> ImageRGB:
    """Load a PNG or JPEG as RGB; alpha, if present, is dropped."""
    try:
        with Image.open(path) as im:
            return ImageRGB(np.asarray(im.convert("RGB")))
    except (FileNotFoundError, UnidentifiedImageError, OSError) as exc:
        raise InvalidImageError(f"cannot read image {path}: {exc}") from exc


def load_image_gray(path: str | Path) -> ImageGray:
    try:
        with Image.open(path) as im:
            return ImageGray(np.asarray(im.convert("L")))
    except (FileNotFoundError, UnidentifiedImageError, OSError) as exc:
        raise InvalidImageError(f"cannot read image {path}: {exc}") from exc


def decode_image(data: bytes) -> ImageRGB:
    """Decode PNG/JPEG bytes (HTTP upload path)."""
    try:
        with Image.open(io.BytesIO(data)) as im:
            return ImageRGB(np.asarray(im.convert("RGB")))
    except (UnidentifiedImageError, OSError) as exc:
        raise InvalidImageError(f"cannot decode image bytes: {exc}") from exc


def save_image(img: ImageRGB | ImageGray | BinaryMask, path: str | Path) -> None:
    """Write PNG or JPEG depending on the file suffix."""
    if isinstance(img, BinaryMask):
        arr = img.data * np.uint8(255)
    else:
        arr = img.pixels
    Image.fromarray(arr).save(path)
