"""Centred 2-D DFT, radial spectral-energy curves and the ideal low-pass.

A *spectrum* here is a complex ``(H, W)`` array with the DC term moved to
``(H // 2, W // 2)``. The forward transform is unnormalised and the
inverse carries ``1 / (H * W)``, so ``sum |F|^2 == H * W * sum I^2``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidLambda
from .scales import REFERENCE_SIDE

# Band edges on the radius axis at the 1000x1000 reference resolution.
LOW_MAX = 100
MID_RANGE = (300, 400)
HIGH_MIN = 500


def fft2d_centered(plane) -> np.ndarray:
    plane = np.asarray(plane, dtype=np.float64)
    if plane.ndim != 2 or plane.size == 0:
        raise ValueError(f"expected a non-empty 2-D plane, got shape {plane.shape}")
    return np.fft.fftshift(np.fft.fft2(plane))


def ifft2d_magnitude(spec) -> np.ndarray:
    """Element-wise magnitude of the inverse of a centred spectrum."""
    return np.abs(np.fft.ifft2(np.fft.ifftshift(spec)))


def radius_grid(shape) -> np.ndarray:
    """Euclidean distance of every coefficient from the centred DC term."""
    H, W = shape
    u = np.arange(H) - H // 2
    v = np.arange(W) - W // 2
    return np.sqrt(u[:, None] ** 2 + v[None, :] ** 2)


def max_radius(shape) -> int:
    H, W = shape
    return math.ceil(math.hypot(H / 2, W / 2))


def energy_curve(spec) -> np.ndarray:
    """E(r): total |F|^2 over the annulus ``r <= radius < r + 1``.

    The returned array has length ``max_radius + 1``.
    """
    spec = np.asarray(spec)
    ring = np.floor(radius_grid(spec.shape)).astype(np.intp)
    power = np.abs(spec) ** 2
    return np.bincount(ring.ravel(), weights=power.ravel(), minlength=max_radius(spec.shape) + 1)


@dataclass(frozen=True)
class BandReport:
    low: float
    mid: float
    high: float
    total: float
    low_share: float
    mid_share: float
    high_share: float

    @property
    def mid_high_share(self) -> float:
        return self.mid_share + self.high_share

    def as_row(self) -> dict:
        return asdict(self)


def band_edges(resolution):
    """Integer radius limits ``(low_max, mid_lo, mid_hi, high_min)``.

    Reference edges are scaled by ``min(H, W) / 1000``; upper limits round
    down and lower limits round up so a scaled band never exceeds its
    reference interval.
    """
    f = min(resolution) / REFERENCE_SIDE
    eps = 1e-9
    return (
        math.floor(LOW_MAX * f + eps),
        math.ceil(MID_RANGE[0] * f - eps),
        math.floor(MID_RANGE[1] * f + eps),
        math.ceil(HIGH_MIN * f - eps),
    )


def band_report(curve, resolution) -> BandReport:
    curve = np.asarray(curve, dtype=np.float64)
    low_max, mid_lo, mid_hi, high_min = band_edges(resolution)
    low = float(curve[: low_max + 1].sum())
    mid = float(curve[mid_lo: mid_hi + 1].sum())
    high = float(curve[high_min:].sum())
    total = float(curve.sum())
    if total > 0:
        shares = (low / total, mid / total, high / total)
    else:
        shares = (0.0, 0.0, 0.0)
    return BandReport(low, mid, high, total, *shares)


def plane_band_report(plane) -> BandReport:
    plane = np.asarray(plane, dtype=np.float64)
    return band_report(energy_curve(fft2d_centered(plane)), plane.shape)


def low_pass(spec, lam: float) -> np.ndarray:
    """Ideal low-pass: keep coefficients within ``min(H, W) * lam`` of DC."""
    if not 0.0 < lam < 1.0:
        raise InvalidLambda(f"lambda must lie in (0, 1), got {lam}")
    spec = np.asarray(spec)
    keep = radius_grid(spec.shape) <= min(spec.shape) * lam
    return np.where(keep, spec, 0)


def write_energy_curve_csv(path, curve) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["r", "energy"])
        for r, e in enumerate(curve):
            w.writerow([r, repr(float(e))])
    return path


def write_band_reports_csv(path, rows) -> Path:
    """``rows`` is an iterable of ``(label, BandReport)`` pairs."""
    path = Path(path)
    fields = ["label", "low", "mid", "high", "total", "low_share", "mid_share", "high_share"]
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields)
        w.writeheader()
        for label, rep in rows:
            w.writerow({"label": label, **rep.as_row()})
    return path
