import numpy as np
import pytest

from illusionkit.errors import MissingGlyph, UnreachableScale
from illusionkit.glyphs import binary_mask, check_coverage, render_characters
from illusionkit.scales import ScaleClass, classify_extent, classify_scale


@pytest.mark.parametrize(
    "pair, expected",
    [
        ((650, 300), ScaleClass.LARGE),
        ((400, 100), ScaleClass.MEDIUM),
        ((150, 80), ScaleClass.SMALL),
        ((170, 90), ScaleClass.UNCLASSIFIED),
        ((550, 20), ScaleClass.UNCLASSIFIED),
        ((600, 600), ScaleClass.LARGE),
        ((200, 10), ScaleClass.MEDIUM),
        ((500, 10), ScaleClass.MEDIUM),
    ],
)
def test_classify_pairs(pair, expected):
    assert classify_scale(pair) is expected


def test_classify_scales_with_canvas():
    assert classify_extent(160, (256, 256)) is ScaleClass.LARGE
    assert classify_extent(38, (256, 256)) is ScaleClass.SMALL
    assert classify_extent(90, (256, 256)) is ScaleClass.MEDIUM


def test_scale_parse():
    assert ScaleClass.parse("L") is ScaleClass.LARGE
    assert ScaleClass.parse("medium") is ScaleClass.MEDIUM
    assert ScaleClass.SMALL.short == "S"
    with pytest.raises(ValueError):
        ScaleClass.parse("huge")


@pytest.mark.parametrize("scale", [ScaleClass.LARGE, ScaleClass.MEDIUM, ScaleClass.SMALL])
@pytest.mark.parametrize("text", ["5", "A", "hello"])
def test_render_lands_in_class(font_path, text, scale):
    raster, layout = render_characters(text, font=font_path, target_scale=scale)
    assert raster.shape == (1000, 1000) and raster.dtype == np.uint8
    assert classify_scale(layout) is scale
    # layout describes the inked region exactly
    ys, xs = np.nonzero(binary_mask(raster))
    top, left = layout.origin
    assert (ys.min(), xs.min()) == (top, left)
    assert (ys.max() - top + 1, xs.max() - left + 1) == layout.bbox


def test_large_digit_extent(font_path):
    _, layout = render_characters("5", font=font_path, target_scale="Large")
    assert max(layout.bbox) >= 600


def test_small_on_small_canvas(font_path):
    raster, layout = render_characters("7", canvas=(256, 256), font=font_path, target_scale="S")
    assert raster.shape == (256, 256)
    assert max(layout.bbox) <= 150 * 0.256


def test_render_deterministic(font_path):
    a, la = render_characters("Q", font=font_path)
    b, lb = render_characters("Q", font=font_path)
    assert a.tobytes() == b.tobytes() and la == lb


def test_empty_text_rejected(font_path):
    with pytest.raises(UnreachableScale):
        render_characters("", font=font_path)


def test_unreachable_small_for_long_text(font_path):
    # A long string cannot be squeezed below the Small bound on a tiny canvas.
    with pytest.raises(UnreachableScale):
        render_characters("abcdefghijklmnopqrstuvwxyz" * 3, canvas=(40, 40), font=font_path, target_scale="S")


def test_missing_glyph(font_path):
    with pytest.raises(MissingGlyph):
        check_coverage("中", font_path)
    with pytest.raises(MissingGlyph):
        render_characters("中", font=font_path)


def test_binary_mask_threshold():
    m = binary_mask(np.array([[0, 127, 128, 255]], np.uint8))
    assert m.tolist() == [[True, True, False, False]]
