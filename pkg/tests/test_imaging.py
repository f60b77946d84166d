import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from illusionkit.errors import ContentLargerThanCanvas, ZeroDimension
from illusionkit.imaging import pad_center_white, quantize, read_png, resize, to_gray, write_png


def test_to_gray_passes_gray_through():
    img = np.full((4, 5), 128, np.uint8)
    out = to_gray(img)
    assert out.dtype == np.float64
    assert np.all(out == 128.0)


def test_to_gray_white_and_red():
    img = np.array([[[255, 255, 255], [255, 0, 0]]], np.uint8)
    out = to_gray(img)
    assert out[0, 0] == pytest.approx(255.0, abs=1e-12)
    assert out[0, 1] == pytest.approx(76.245, abs=1e-12)  # 0.299 * 255


def test_to_gray_rejects_float_input():
    with pytest.raises(TypeError):
        to_gray(np.zeros((2, 2)))


def test_resize_constant_stays_exact():
    out = resize(np.full((100, 100), 200.0), (10, 10))
    assert out.shape == (10, 10)
    assert np.all(out == 200.0)


def test_resize_two_by_two_mean():
    out = resize(np.array([[0.0, 255.0], [0.0, 255.0]]), (1, 1))
    assert out[0, 0] == 127.5


def test_resize_thousand_by_tenth():
    assert resize(np.zeros((1000, 1000)), (100, 100)).shape == (100, 100)


def test_resize_non_integer_ratio_preserves_mean(rng):
    p = rng.uniform(0, 255, (37, 53))
    out = resize(p, (10, 17))
    assert out.shape == (10, 17)
    # Box averaging conserves the total "mass" up to the area ratio.
    assert out.mean() == pytest.approx(p.mean(), rel=1e-12)


def test_resize_zero_dimension():
    with pytest.raises(ZeroDimension):
        resize(np.zeros((4, 4)), (0, 2))


@pytest.mark.parametrize("mid", [(60, 60), (30, 20), (120, 120)])
def test_resize_composition_through_multiples(rng, mid):
    p = rng.uniform(0, 255, (120, 120))
    once = resize(p, (10, 10))
    twice = resize(resize(p, mid), (10, 10))
    np.testing.assert_allclose(twice, once, atol=1e-6)


def test_pad_center_margins():
    out = pad_center_white(np.zeros((100, 100)), (1000, 1000))
    assert out.shape == (1000, 1000)
    assert np.all(out[:450] == 255.0) and np.all(out[550:] == 255.0)
    assert np.all(out[:, :450] == 255.0) and np.all(out[:, 550:] == 255.0)
    assert np.all(out[450:550, 450:550] == 0.0)


def test_pad_center_floor_offset():
    content = np.arange(9, dtype=float).reshape(3, 3)
    out = pad_center_white(content, (4, 4))
    np.testing.assert_array_equal(out[:3, :3], content)
    assert np.all(out[3, :] == 255.0) and np.all(out[:, 3] == 255.0)


def test_pad_all_white():
    assert np.all(pad_center_white(np.full((5, 7), 255.0), (11, 9)) == 255.0)


def test_pad_too_large():
    with pytest.raises(ContentLargerThanCanvas):
        pad_center_white(np.zeros((5, 5)), (4, 6))


@settings(max_examples=50, deadline=None)
@given(
    arrays(np.float64, st.tuples(st.integers(1, 20), st.integers(1, 20)),
           elements=st.floats(0, 255)),
    st.integers(1, 25), st.integers(1, 25),
)
def test_outputs_stay_in_byte_range(plane, h, w):
    out = resize(plane, (h, w))
    assert out.min() >= -1e-9 and out.max() <= 255 + 1e-9
    H, W = max(h, plane.shape[0]), max(w, plane.shape[1])
    padded = pad_center_white(plane, (H, W))
    assert padded.min() >= 0 and padded.max() <= 255
    # pasted samples are untouched
    top, left = (H - plane.shape[0]) // 2, (W - plane.shape[1]) // 2
    np.testing.assert_array_equal(padded[top:top + plane.shape[0], left:left + plane.shape[1]], plane)


def test_quantize_clamps_and_rounds():
    out = quantize(np.array([-3.0, 0.4, 127.5, 254.6, 300.0]))
    assert out.dtype == np.uint8
    assert out.tolist() == [0, 0, 128, 255, 255]


def test_png_roundtrip(tmp_path, rng):
    gray = rng.integers(0, 256, (13, 17), dtype=np.uint8)
    rgb = rng.integers(0, 256, (5, 6, 3), dtype=np.uint8)
    np.testing.assert_array_equal(read_png(write_png(tmp_path / "g.png", gray)), gray)
    np.testing.assert_array_equal(read_png(write_png(tmp_path / "c.png", rgb)), rgb)
