"""Perception-adjusted variants and the multi-scale input tuple.

``perceive`` removes high spatial frequencies with an ideal low-pass, then
shrinks the result by ``s`` and pads it back onto a white canvas. A
schedule of ``K`` such (lambda, s) pairs, spaced geometrically between a
strong and a weak boundary, turns one image into ``K + 1`` views.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import IndexOutOfRange, InvalidLambda, KTooSmall, NonMonotoneBoundaries, ZeroDimension
from .imaging import as_raster, pad_center_white, quantize, resize
from .spectral import fft2d_centered, ifft2d_magnitude, low_pass


@dataclass(frozen=True)
class PerceptionParams:
    lam: float
    s: float

    def __post_init__(self):
        if not 0.0 < self.lam < 1.0:
            raise InvalidLambda(f"lambda must lie in (0, 1), got {self.lam}")
        if not 0.0 < self.s < 1.0:
            raise ValueError(f"scale factor must lie in (0, 1), got {self.s}")

    def scaled_dims(self, shape) -> tuple:
        H, W = shape[:2]
        # Tolerate float noise such as 1000 * 0.29999999999999993.
        h = math.floor(H * self.s + 1e-9)
        w = math.floor(W * self.s + 1e-9)
        if h < 1 or w < 1:
            raise ZeroDimension(f"s={self.s} shrinks {H}x{W} to {h}x{w}")
        return h, w


STRONG = PerceptionParams(0.012, 0.1)
WEAK = PerceptionParams(0.05, 0.4)
DEFAULT_K = 3


@dataclass(frozen=True)
class SmspSchedule:
    k: int
    strong: PerceptionParams
    weak: PerceptionParams
    derived: tuple = field(default=())

    def __len__(self):
        return len(self.derived)

    def __iter__(self):
        return iter(self.derived)

    def __getitem__(self, i):
        return self.derived[i]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "strong": [self.strong.lam, self.strong.s],
            "weak": [self.weak.lam, self.weak.s],
        }

    @classmethod
    def from_dict(cls, d) -> "SmspSchedule":
        return build_schedule(
            int(d.get("k", DEFAULT_K)),
            PerceptionParams(*d.get("strong", (STRONG.lam, STRONG.s))),
            PerceptionParams(*d.get("weak", (WEAK.lam, WEAK.s))),
        )


def _geometric(first: float, last: float, k: int) -> list:
    out = [first]
    ratio = last / first
    for i in range(2, k):
        out.append(first * ratio ** ((i - 1) / (k - 1)))
    out.append(last)
    return out


def build_schedule(k=DEFAULT_K, strong=STRONG, weak=WEAK) -> SmspSchedule:
    """Interpolate ``k`` parameter pairs geometrically from strong to weak."""
    if k < 2:
        raise KTooSmall(f"k must be >= 2, got {k}")
    if not (strong.lam < weak.lam and strong.s < weak.s):
        raise NonMonotoneBoundaries(
            f"need strong < weak in both lambda and s, got {strong} and {weak}"
        )
    lams = _geometric(strong.lam, weak.lam, k)
    scales = _geometric(strong.s, weak.s, k)
    derived = tuple(PerceptionParams(l, s) for l, s in zip(lams, scales))
    for a, b in zip(derived, derived[1:]):
        if not (a.lam < b.lam and a.s < b.s):
            raise NonMonotoneBoundaries(f"boundaries too close for k={k}: {a} vs {b}")
    return SmspSchedule(k, strong, weak, derived)


def perceive_plane(plane, params: PerceptionParams, *, filtering=True, rescaling=True) -> np.ndarray:
    """Unquantised perception transform of one float plane."""
    plane = np.asarray(plane, dtype=np.float64)
    if filtering:
        plane = ifft2d_magnitude(low_pass(fft2d_centered(plane), params.lam))
    if rescaling:
        shape = plane.shape
        plane = pad_center_white(resize(plane, params.scaled_dims(shape)), shape)
    return plane


def perceive(img, params: PerceptionParams, *, filtering=True, rescaling=True) -> np.ndarray:
    """Perception-adjusted variant of a raster, same shape and dtype.

    RGB rasters are processed channel by channel with identical parameters.
    """
    arr = as_raster(img)
    if arr.ndim == 2:
        return quantize(perceive_plane(arr, params, filtering=filtering, rescaling=rescaling))
    chans = [
        quantize(perceive_plane(arr[..., c], params, filtering=filtering, rescaling=rescaling))
        for c in range(3)
    ]
    return np.stack(chans, axis=-1)


def build_smsp_input(img, schedule: SmspSchedule, *, filtering=True, rescaling=True) -> list:
    """``[img, variant_1, ..., variant_K]`` ordered strong to weak."""
    arr = as_raster(img)
    return [arr] + [perceive(arr, p, filtering=filtering, rescaling=rescaling) for p in schedule]


ABLATIONS = ("no_filter", "no_rescale", "single_variant")


def ablate(img, mode: str, schedule: SmspSchedule, index: int | None = None) -> list:
    """Ablated tuple: drop one operation, or keep a single variant.

    ``mode`` is ``"no_filter"``, ``"no_rescale"`` or ``"single_variant"``
    (the latter needs a 1-based ``index``; ``"single_variant:2"`` also works).
    """
    if mode.startswith("single_variant:"):
        mode, index = "single_variant", int(mode.split(":", 1)[1])
    if mode == "no_filter":
        return build_smsp_input(img, schedule, filtering=False)
    if mode == "no_rescale":
        return build_smsp_input(img, schedule, rescaling=False)
    if mode == "single_variant":
        if index is None or not 1 <= index <= schedule.k:
            raise IndexOutOfRange(f"variant index must be in 1..{schedule.k}, got {index}")
        arr = as_raster(img)
        return [arr, perceive(arr, schedule[index - 1])]
    raise ValueError(f"unknown ablation mode {mode!r}; expected one of {ABLATIONS}")


# --- baselines ---------------------------------------------------------------

@dataclass(frozen=True)
class FilteredConfig:
    sigma: float = 2.0
    passes: int = 3
    radius_sigmas: float = 3.0
    sharpen_amount: float = 1.0
    sharpen_sigma: float = 2.0


@dataclass(frozen=True)
class BlurHistConfig:
    sigma: float = 2.0
    radius_sigmas: float = 3.0


def gaussian_kernel(sigma: float, radius: int) -> np.ndarray:
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def gaussian_blur(plane, sigma: float, radius_sigmas: float = 3.0) -> np.ndarray:
    """Separable Gaussian blur truncated at ``radius_sigmas * sigma``."""
    plane = np.asarray(plane, dtype=np.float64)
    if sigma <= 0:
        return plane.copy()
    k = gaussian_kernel(sigma, max(1, int(math.ceil(radius_sigmas * sigma))))
    out = ndimage.correlate1d(plane, k, axis=0, mode="nearest")
    return ndimage.correlate1d(out, k, axis=1, mode="nearest")


def _filtered_plane(plane, cfg: FilteredConfig) -> np.ndarray:
    out = np.asarray(plane, dtype=np.float64)
    for _ in range(cfg.passes):
        out = gaussian_blur(out, cfg.sigma, cfg.radius_sigmas)
    if cfg.sharpen_amount:
        soft = gaussian_blur(out, cfg.sharpen_sigma, cfg.radius_sigmas)
        out = out + cfg.sharpen_amount * (out - soft)
    return out


def baseline_filtered(img, cfg: FilteredConfig = FilteredConfig()) -> np.ndarray:
    """Repeated Gaussian blur followed by an unsharp mask."""
    arr = as_raster(img)
    if arr.ndim == 2:
        return quantize(_filtered_plane(arr, cfg))
    return np.stack([quantize(_filtered_plane(arr[..., c], cfg)) for c in range(3)], axis=-1)


def equalize_levels(levels) -> np.ndarray:
    """Histogram-equalise a ``uint8`` array with ``floor(255 * cdf(v))``."""
    levels = np.asarray(levels, dtype=np.uint8)
    hist = np.bincount(levels.ravel(), minlength=256)
    cdf = np.cumsum(hist) / levels.size
    lut = np.floor(255.0 * cdf + 1e-9).clip(0, 255).astype(np.uint8)
    return lut[levels]


def _rgb_to_ycbcr(rgb):
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    y = 0.299 * r + 0.587 * g + 0.114 * b
    cb = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b
    cr = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b
    return y, cb, cr


def _ycbcr_to_rgb(y, cb, cr):
    r = y + 1.402 * (cr - 128.0)
    g = y - 0.344136 * (cb - 128.0) - 0.714136 * (cr - 128.0)
    b = y + 1.772 * (cb - 128.0)
    return np.stack([r, g, b], axis=-1)


def baseline_blur_histogram(img, cfg: BlurHistConfig = BlurHistConfig()) -> np.ndarray:
    """Gaussian blur, then global histogram equalisation of luminance.

    Chroma of RGB inputs is carried through unchanged.
    """
    arr = as_raster(img)
    if arr.ndim == 2:
        return equalize_levels(quantize(gaussian_blur(arr, cfg.sigma, cfg.radius_sigmas)))
    blurred = np.stack(
        [gaussian_blur(arr[..., c], cfg.sigma, cfg.radius_sigmas) for c in range(3)], axis=-1
    )
    y, cb, cr = _rgb_to_ycbcr(blurred)
    y_eq = equalize_levels(quantize(y)).astype(np.float64)
    return quantize(_ycbcr_to_rgb(y_eq, cb, cr))
