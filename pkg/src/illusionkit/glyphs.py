"""Rendering of the clean "original" character images."""
from __future__ import annotations

import functools
import importlib.util
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from fontTools.ttLib import TTFont
from PIL import Image, ImageDraw, ImageFont

from .errors import ConfigError, MissingGlyph, UnreachableScale
from .scales import BOUNDS, TARGETS, ScaleClass, scale_factor

FONT_ENV = "ILLUSIONKIT_FONT"
_SYSTEM_FONTS = (
    "/usr/share/fonts/truetype/dejavu/DejaVuSans-Bold.ttf",
    "/usr/share/fonts/TTF/DejaVuSans-Bold.ttf",
    "/Library/Fonts/Arial Bold.ttf",
    "C:/Windows/Fonts/arialbd.ttf",
)
MIN_FONT_SIZE = 6
MASK_THRESHOLD = 128


@dataclass(frozen=True)
class GlyphLayout:
    text: str
    bbox: tuple  # (C_H, C_W) of the inked region
    origin: tuple  # (top, left) of the inked region on the canvas
    canvas: tuple = (1000, 1000)
    font_size: int = 0


def default_font_path() -> Path:
    """Locate a usable bold sans font.

    ``$ILLUSIONKIT_FONT`` wins; otherwise common system locations and the
    DejaVu copy bundled with matplotlib are tried.
    """
    candidates = []
    if os.environ.get(FONT_ENV):
        candidates.append(os.environ[FONT_ENV])
    candidates.extend(_SYSTEM_FONTS)
    spec = importlib.util.find_spec("matplotlib")
    if spec is not None and spec.submodule_search_locations:
        for loc in spec.submodule_search_locations:
            candidates.append(os.path.join(loc, "mpl-data", "fonts", "ttf", "DejaVuSans-Bold.ttf"))
    for c in candidates:
        if os.path.isfile(c):
            return Path(c)
    raise ConfigError(f"no usable font found; set {FONT_ENV} to a .ttf/.otf file")


@functools.lru_cache(maxsize=16)
def _cmap(font_path: str) -> frozenset:
    with TTFont(font_path, fontNumber=0, lazy=True) as tt:
        return frozenset(tt.getBestCmap() or {})


def check_coverage(text: str, font_path) -> None:
    """Raise :class:`MissingGlyph` if ``font_path`` lacks any code point of ``text``."""
    try:
        cmap = _cmap(str(font_path))
    except Exception as exc:  # fontTools raises a grab bag of types
        raise ConfigError(f"cannot read font {font_path}: {exc}") from exc
    for ch in text:
        if ch.isspace():
            continue
        if ord(ch) not in cmap:
            raise MissingGlyph(f"font {Path(font_path).name} has no glyph for {ch!r} (U+{ord(ch):04X})")


def rasterize_text(text: str, font_path, size: int) -> np.ndarray:
    """Black-on-white anti-aliased rendering of ``text`` cropped to its ink."""
    font = ImageFont.truetype(str(font_path), size)
    left, top, right, bottom = font.getbbox(text)
    pad = 2 + size // 8
    im = Image.new("L", (right - left + 2 * pad, bottom - top + 2 * pad), 255)
    ImageDraw.Draw(im).text((pad - left, pad - top), text, font=font, fill=0)
    arr = np.asarray(im)
    ys, xs = np.nonzero(arr < MASK_THRESHOLD)
    if ys.size == 0:
        raise MissingGlyph(f"text {text!r} renders no ink at size {size}")
    return arr[ys.min():ys.max() + 1, xs.min():xs.max() + 1].copy()


def render_characters(text, canvas=(1000, 1000), font=None, target_scale=ScaleClass.LARGE):
    """Render ``text`` centred in black on a white canvas.

    The point size is searched so that the longest side of the inked
    bounding box lands near the target of ``target_scale``.

    Returns ``(raster, layout)`` where ``raster`` is a ``uint8`` (H, W) array.
    """
    if not text:
        raise UnreachableScale("text must be non-empty")
    target_scale = ScaleClass.parse(target_scale)
    if target_scale is ScaleClass.UNCLASSIFIED:
        raise UnreachableScale("the renderer only targets Large, Medium or Small")
    font_path = Path(font) if font is not None else default_font_path()
    check_coverage(text, font_path)

    H, W = canvas
    f = scale_factor(canvas)
    lo, hi = (b * f for b in BOUNDS[target_scale])
    target = TARGETS[target_scale] * f

    def in_class(ink):
        side = max(ink.shape)
        return lo <= side <= hi and ink.shape[0] <= H and ink.shape[1] <= W

    size, ink, best = 100, None, None
    for _ in range(12):
        ink = rasterize_text(text, font_path, size)
        side = max(ink.shape)
        if in_class(ink) and (best is None or abs(side - target) < abs(max(best[1].shape) - target)):
            best = (size, ink)
        if abs(side - target) <= max(1.0, 0.01 * target):
            break
        new = max(1, int(round(size * target / side)))
        if new == size:
            new = size + (1 if side < target else -1)
        if new < MIN_FONT_SIZE:
            break
        size = new
    if best is None:
        raise UnreachableScale(
            f"cannot render {text!r} as {target_scale.value} on a {H}x{W} canvas"
        )
    size, ink = best
    if size < MIN_FONT_SIZE:
        raise UnreachableScale(f"{text!r} needs font size {size} < {MIN_FONT_SIZE} for {target_scale.value}")
    out = np.full((H, W), 255, dtype=np.uint8)
    h, w = ink.shape
    top, left = (H - h) // 2, (W - w) // 2
    out[top:top + h, left:left + w] = ink
    layout = GlyphLayout(text=text, bbox=(h, w), origin=(top, left), canvas=(H, W), font_size=size)
    return out, layout


def binary_mask(original) -> np.ndarray:
    """Character region of a rendered original: pixels darker than 128."""
    return np.asarray(original) < MASK_THRESHOLD
