"""Pixel-buffer primitives.

Two array conventions are used throughout the package:

* a *raster* is a ``uint8`` array of shape ``(H, W)`` or ``(H, W, 3)``;
* a *plane* is a ``float64`` array of shape ``(H, W)`` holding samples on
  the nominal 0-255 scale.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .errors import ContentLargerThanCanvas, ZeroDimension

GRAY_WEIGHTS = (0.299, 0.587, 0.114)
WHITE = 255.0


def as_raster(img) -> np.ndarray:
    """Validate ``img`` as a raster and return it as a ``uint8`` array."""
    arr = np.asarray(img)
    if arr.dtype != np.uint8:
        raise TypeError(f"raster must be uint8, got {arr.dtype}")
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    if not (arr.ndim == 2 or (arr.ndim == 3 and arr.shape[2] == 3)):
        raise ValueError(f"raster must be HxW or HxWx3, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ZeroDimension(f"raster has empty dimension: {arr.shape}")
    return arr


def channels(img) -> int:
    arr = as_raster(img)
    return 1 if arr.ndim == 2 else 3


def to_gray(img) -> np.ndarray:
    """Luminance plane of a raster using Rec. 601 weights.

    Gray rasters pass through unchanged apart from the float conversion.
    """
    arr = as_raster(img)
    if arr.ndim == 2:
        return arr.astype(np.float64)
    rgb = arr.astype(np.float64)
    r, g, b = GRAY_WEIGHTS
    return r * rgb[..., 0] + g * rgb[..., 1] + b * rgb[..., 2]


def quantize(plane) -> np.ndarray:
    """Clamp to [0, 255] and round to the nearest 8-bit level."""
    return np.rint(np.clip(plane, 0.0, 255.0)).astype(np.uint8)


def _box_weights(n_in: int, n_out: int) -> np.ndarray:
    # Output cell i covers [i*n_in, (i+1)*n_in) and input cell j covers
    # [j*n_out, (j+1)*n_out) on a common integer grid, so overlaps are ints.
    i = np.arange(n_out)[:, None]
    j = np.arange(n_in)[None, :]
    lo = np.maximum(i * n_in, j * n_out)
    hi = np.minimum((i + 1) * n_in, (j + 1) * n_out)
    return np.clip(hi - lo, 0, None).astype(np.float64)


def resize(plane, new_dims) -> np.ndarray:
    """Area-averaging (box) resample of a plane to ``new_dims = (h, w)``.

    Each output sample is the exact area-weighted mean of the input samples
    it covers, which keeps constant planes constant bit-for-bit.
    """
    plane = np.asarray(plane, dtype=np.float64)
    h, w = (int(d) for d in new_dims)
    if h < 1 or w < 1:
        raise ZeroDimension(f"target dimensions must be >= 1, got {(h, w)}")
    H, W = plane.shape
    if (h, w) == (H, W):
        return plane.copy()
    rows = _box_weights(H, h)
    cols = _box_weights(W, w)
    # Normalise after the products: the weight sums are exactly H and W.
    return (rows @ plane @ cols.T) / (H * W)


def pad_center_white(plane, canvas) -> np.ndarray:
    """Paste ``plane`` at the centre of a white canvas of shape ``canvas``.

    Odd margins put the extra pixel on the bottom/right.
    """
    plane = np.asarray(plane, dtype=np.float64)
    H, W = (int(d) for d in canvas)
    h, w = plane.shape
    if h > H or w > W:
        raise ContentLargerThanCanvas(f"content {(h, w)} exceeds canvas {(H, W)}")
    out = np.full((H, W), WHITE)
    top, left = (H - h) // 2, (W - w) // 2
    out[top:top + h, left:left + w] = plane
    return out


def content_box(canvas, dims):
    """(top, left, h, w) of a ``dims`` block centred by :func:`pad_center_white`."""
    H, W = canvas
    h, w = dims
    return (H - h) // 2, (W - w) // 2, h, w


def read_png(path) -> np.ndarray:
    with Image.open(path) as im:
        if im.mode in ("L", "RGB"):
            return np.asarray(im).copy()
        if im.mode in ("1", "I", "I;16", "F", "LA"):
            return np.asarray(im.convert("L")).copy()
        return np.asarray(im.convert("RGB")).copy()


def write_png(path, img) -> Path:
    arr = as_raster(img)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(arr).save(path, format="PNG", optimize=False)
    return path
