"""Hidden-character scale classes.

Thresholds are defined on the longest side of the character bounding box
for a 1000x1000 canvas and scale linearly with ``min(H, W) / 1000``.
"""
from __future__ import annotations

import enum

REFERENCE_SIDE = 1000


class ScaleClass(str, enum.Enum):
    LARGE = "Large"
    MEDIUM = "Medium"
    SMALL = "Small"
    UNCLASSIFIED = "Unclassified"

    @property
    def short(self) -> str:
        return {"Large": "L", "Medium": "M", "Small": "S"}.get(self.value, "U")

    @classmethod
    def parse(cls, value) -> "ScaleClass":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        for member in cls:
            if key in (member.value.lower(), member.short.lower()):
                return member
        raise ValueError(f"unknown scale class: {value!r}")


# (lower, upper) bounds on max(C_H, C_W) at the reference resolution.
BOUNDS = {
    ScaleClass.LARGE: (600.0, float("inf")),
    ScaleClass.MEDIUM: (200.0, 500.0),
    ScaleClass.SMALL: (0.0, 150.0),
}

# Sizes the renderer aims for; each sits well inside its class.
TARGETS = {
    ScaleClass.LARGE: 700.0,
    ScaleClass.MEDIUM: 350.0,
    ScaleClass.SMALL: 120.0,
}


def scale_factor(canvas) -> float:
    return min(canvas) / REFERENCE_SIDE


def classify_extent(max_side: float, canvas=(1000, 1000)) -> ScaleClass:
    m = max_side / scale_factor(canvas)
    for cls, (lo, hi) in BOUNDS.items():
        if lo <= m <= hi:
            return cls
    return ScaleClass.UNCLASSIFIED


def classify_scale(layout, canvas=None) -> ScaleClass:
    """Scale class of a :class:`~illusionkit.glyphs.GlyphLayout` or an
    explicit ``(C_H, C_W)`` pair."""
    if hasattr(layout, "bbox"):
        c_h, c_w = layout.bbox
        canvas = canvas or layout.canvas
    else:
        c_h, c_w = layout
    return classify_extent(max(c_h, c_w), canvas or (1000, 1000))
