"""Procedural noise textures used as illusion backgrounds.

Five kinds are supported:

=====  ======================  ==============================
kind   texture                 knob that differs by region
=====  ======================  ==============================
VG     vertical gratings       stripe width
GN     Gaussian noise          base gray level
HD     halftone dots           dot radius
LN     labyrinth noise         smoothing radius of the noise
MN     micro-text noise        symbol set
=====  ======================  ==============================

Random draws depend only on ``(kind, dims, seed)`` and never on the knob
values, so the character and background textures share their phase and
the visible seam comes from the parameter change alone.
"""
from __future__ import annotations

import dataclasses
import functools
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import IdenticalParams, InvalidParams, MaskMismatch
from .imaging import quantize

KINDS = ("VG", "GN", "HD", "LN", "MN")


@dataclass(frozen=True)
class VGParams:
    stripe_width: int


@dataclass(frozen=True)
class GNParams:
    base_gray: float
    sigma: float = 30.0


@dataclass(frozen=True)
class HDParams:
    dot_radius: float
    spacing: int = 14
    jitter: float = 0.25


@dataclass(frozen=True)
class LNParams:
    smoothing: float


@dataclass(frozen=True)
class MNParams:
    symbols: tuple
    glyph_size: int = 12
    spacing: int = 14
    jitter: float = 0.2


PARAM_TYPES = {"VG": VGParams, "GN": GNParams, "HD": HDParams, "LN": LNParams, "MN": MNParams}

# (character region, background region)
DEFAULT_PARAMS = {
    "VG": (VGParams(12), VGParams(8)),
    "GN": (GNParams(140.0), GNParams(120.0)),
    "HD": (HDParams(5.0), HDParams(3.0)),
    "LN": (LNParams(7.0), LNParams(4.0)),
    "MN": (MNParams(("@", "&")), MNParams(("$", "%", "#"))),
}


def params_from_dict(kind: str, d) -> object:
    kind = kind.upper()
    if kind not in PARAM_TYPES:
        raise InvalidParams(f"unknown texture kind {kind!r}")
    if isinstance(d, PARAM_TYPES[kind]):
        return d
    d = dict(d)
    if "symbols" in d:
        d["symbols"] = tuple(d["symbols"])
    try:
        return PARAM_TYPES[kind](**d)
    except TypeError as exc:
        raise InvalidParams(f"bad {kind} parameters {d}: {exc}") from exc


def params_to_dict(p) -> dict:
    d = dataclasses.asdict(p)
    if "symbols" in d:
        d["symbols"] = list(d["symbols"])
    return d


def _validate(kind, p):
    ok = {
        "VG": lambda: p.stripe_width >= 1,
        "GN": lambda: 0 <= p.base_gray <= 255 and p.sigma >= 0,
        "HD": lambda: p.dot_radius > 0 and p.spacing >= 2 and 0 <= p.jitter < 0.5,
        "LN": lambda: p.smoothing > 0,
        "MN": lambda: len(p.symbols) > 0 and p.glyph_size >= 4 and p.spacing >= 2 and 0 <= p.jitter < 0.5,
    }[kind]
    if not isinstance(p, PARAM_TYPES[kind]) or not ok():
        raise InvalidParams(f"invalid {kind} parameters: {p}")


def _rng(seed, kind):
    # Stream depends on the kind so different backgrounds of one sample differ.
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, KINDS.index(kind)])


def _grid_points(dims, spacing, jitter, rng):
    H, W = dims
    ny, nx = -(-H // spacing), -(-W // spacing)
    offs = rng.uniform(-jitter, jitter, size=(ny, nx, 2)) * spacing
    cy = (np.arange(ny)[:, None] + 0.5) * spacing + offs[..., 0]
    cx = (np.arange(nx)[None, :] + 0.5) * spacing + offs[..., 1]
    return cy, cx


def _vertical_gratings(p, dims, seed):
    H, W = dims
    cols = np.where((np.arange(W) // p.stripe_width) % 2 == 0, 0.0, 255.0)
    return np.broadcast_to(cols, (H, W)).copy()


def _gaussian_noise(p, dims, seed):
    z = _rng(seed, "GN").standard_normal(dims)
    return np.clip(p.base_gray + p.sigma * z, 0.0, 255.0)


def _halftone_dots(p, dims, seed):
    H, W = dims
    cy, cx = _grid_points(dims, p.spacing, p.jitter, _rng(seed, "HD"))
    out = np.full(dims, 255.0)
    r = p.dot_radius
    rr = int(np.ceil(r))
    for y, x in zip(cy.ravel(), cx.ravel()):
        y0, y1 = max(0, int(y) - rr - 1), min(H, int(y) + rr + 2)
        x0, x1 = max(0, int(x) - rr - 1), min(W, int(x) + rr + 2)
        if y0 >= y1 or x0 >= x1:
            continue
        yy = np.arange(y0, y1)[:, None] + 0.5
        xx = np.arange(x0, x1)[None, :] + 0.5
        inside = (yy - y) ** 2 + (xx - x) ** 2 <= r * r
        out[y0:y1, x0:x1][inside] = 0.0
    return out


def _labyrinth_noise(p, dims, seed):
    z = _rng(seed, "LN").standard_normal(dims)
    smooth = ndimage.gaussian_filter(z, p.smoothing, mode="wrap")
    return np.where(smooth > 0.0, 255.0, 0.0)


@functools.lru_cache(maxsize=64)
def _symbol_bitmap(symbol: str, size: int, font_path: str) -> np.ndarray:
    from .glyphs import rasterize_text

    ink = rasterize_text(symbol, font_path, size).astype(np.float64)
    ink.setflags(write=False)
    return ink


def micro_text_layout(p: MNParams, dims, seed):
    """Placements ``(top, left, symbol)`` of a micro-text texture.

    Positions and choice indices depend only on ``seed``; the symbol set
    decides which glyph each index maps to.
    """
    rng = _rng(seed, "MN")
    cy, cx = _grid_points(dims, p.spacing, p.jitter, rng)
    picks = rng.integers(0, 2**31, size=cy.shape)
    out = []
    for y, x, k in zip(cy.ravel(), cx.ravel(), picks.ravel()):
        out.append((int(round(y)), int(round(x)), p.symbols[int(k) % len(p.symbols)]))
    return out


def _micro_text(p, dims, seed, font=None):
    from .glyphs import default_font_path

    font_path = str(font or default_font_path())
    H, W = dims
    out = np.full(dims, 255.0)
    for cy, cx, sym in micro_text_layout(p, dims, seed):
        bm = _symbol_bitmap(sym, p.glyph_size, font_path)
        h, w = bm.shape
        top, left = cy - h // 2, cx - w // 2
        y0, x0 = max(0, top), max(0, left)
        y1, x1 = min(H, top + h), min(W, left + w)
        if y0 >= y1 or x0 >= x1:
            continue
        patch = bm[y0 - top:y1 - top, x0 - left:x1 - left]
        np.minimum(out[y0:y1, x0:x1], patch, out=out[y0:y1, x0:x1])
    return out


_BUILDERS = {
    "VG": _vertical_gratings,
    "GN": _gaussian_noise,
    "HD": _halftone_dots,
    "LN": _labyrinth_noise,
}


def generate_texture(kind: str, params, dims, seed: int, font=None) -> np.ndarray:
    """Float plane of texture ``kind`` with values in [0, 255]."""
    kind = kind.upper()
    p = params_from_dict(kind, params)
    _validate(kind, p)
    dims = tuple(int(d) for d in dims)
    if kind == "MN":
        return _micro_text(p, dims, seed, font)
    return _BUILDERS[kind](p, dims, seed)


def compose_illusion(mask, kind: str, p_c, p_b, seed: int, font=None) -> np.ndarray:
    """Character texture inside ``mask``, background texture elsewhere.

    Returns a ``uint8`` gray raster with the shape of ``mask``.
    """
    kind = kind.upper()
    p_c, p_b = params_from_dict(kind, p_c), params_from_dict(kind, p_b)
    if p_c == p_b:
        raise IdenticalParams(f"{kind}: character and background parameters are identical")
    mask = np.asarray(mask)
    if mask.ndim != 2:
        raise MaskMismatch(f"mask must be 2-D, got shape {mask.shape}")
    mask = mask.astype(bool)
    inner = generate_texture(kind, p_c, mask.shape, seed, font)
    outer = generate_texture(kind, p_b, mask.shape, seed, font)
    return quantize(np.where(mask, inner, outer))


def region_fidelity(illusion, background, mask, window: int = 25) -> float:
    """Fraction of mask pixels re-derived from ``illusion`` vs pure ``background``.

    A mask pixel counts as recovered when some pixel within a ``window``
    square around it differs between the two images.
    """
    diff = np.asarray(illusion, dtype=np.int16) != np.asarray(quantize(background), dtype=np.int16)
    near = ndimage.maximum_filter(diff, size=window, mode="constant")
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        return 1.0
    return float((near & mask).sum() / mask.sum())
