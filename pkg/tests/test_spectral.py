import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from illusionkit.errors import InvalidLambda
from illusionkit.spectral import (
    band_edges, band_report, energy_curve, fft2d_centered, ifft2d_magnitude, low_pass,
    max_radius, plane_band_report, write_band_reports_csv, write_energy_curve_csv,
)

from oracles import direct_dft_centered, lattice_annulus_counts


def test_constant_is_pure_dc():
    F = fft2d_centered(np.full((8, 8), 128.0))
    assert abs(F[4, 4]) == pytest.approx(8192.0)
    rest = np.abs(F).copy()
    rest[4, 4] = 0
    assert rest.max() < 1e-9


def test_impulse_is_flat():
    p = np.zeros((8, 8))
    p[0, 0] = 1.0
    np.testing.assert_allclose(np.abs(fft2d_centered(p)), 1.0, atol=1e-12)


@pytest.mark.parametrize("shape", [(16, 16), (7, 11), (10, 5)])
def test_matches_direct_sum(rng, shape):
    p = rng.uniform(0, 255, shape)
    np.testing.assert_allclose(fft2d_centered(p), direct_dft_centered(p), atol=1e-6, rtol=0)


def test_roundtrip(rng):
    p = rng.uniform(0, 255, (16, 16))
    np.testing.assert_allclose(ifft2d_magnitude(fft2d_centered(p)), p, atol=1e-6)


def test_zero_and_dc_removed():
    assert np.all(ifft2d_magnitude(np.zeros((6, 6), complex)) == 0)
    F = fft2d_centered(np.full((6, 6), 42.0))
    F[3, 3] = 0
    np.testing.assert_allclose(ifft2d_magnitude(F), 0, atol=1e-12)


def test_energy_curve_constant():
    E = energy_curve(fft2d_centered(np.full((8, 8), 128.0)))
    assert len(E) == max_radius((8, 8)) + 1 == 7
    assert E[0] == pytest.approx(8192.0 ** 2)
    assert np.all(np.abs(E[1:]) < 1e-12 * 8192.0 ** 2)


def test_energy_curve_impulse_counts_lattice_points():
    p = np.zeros((8, 8))
    p[0, 0] = 1.0
    E = energy_curve(fft2d_centered(p))
    counts = lattice_annulus_counts(8, 8)
    expected = [counts.get(r, 0) for r in range(len(E))]
    np.testing.assert_allclose(E, expected, atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 40), st.integers(1, 40)),
              elements=st.floats(0, 255)))
def test_parseval(plane):
    E = energy_curve(fft2d_centered(plane))
    expected = plane.size * np.sum(plane ** 2)
    assert np.all(E >= 0)
    assert E.sum() == pytest.approx(expected, rel=1e-9, abs=1e-6)


def test_band_report_constant():
    rep = plane_band_report(np.full((64, 64), 77.0))
    assert rep.low_share == 1.0
    assert rep.mid_share == 0.0 and rep.high_share == 0.0


def test_band_edges():
    assert band_edges((1000, 1000)) == (100, 300, 400, 500)
    assert band_edges((512, 512))[0] == 51
    assert band_edges((512, 700))[0] == 51


def test_band_shares_bounded(rng):
    rep = plane_band_report(rng.uniform(0, 255, (200, 200)))
    for s in (rep.low_share, rep.mid_share, rep.high_share):
        assert 0.0 <= s <= 1.0
    assert rep.low + rep.mid + rep.high <= rep.total * (1 + 1e-12)


def test_low_pass_beyond_nyquist_unchanged(rng):
    F = fft2d_centered(rng.uniform(0, 255, (16, 16)))
    np.testing.assert_array_equal(low_pass(F, 0.99), F)  # 16*0.99 > r_max = 12


def test_low_pass_constant_image():
    p = np.full((16, 16), 91.0)
    out = ifft2d_magnitude(low_pass(fft2d_centered(p), 0.01))
    np.testing.assert_allclose(out, p, atol=1e-9)


def test_low_pass_checkerboard_to_mean():
    p = (np.indices((16, 16)).sum(axis=0) % 2) * 255.0
    # Only DC lies within radius 0.8; the oracle spectrum confirms the rest of
    # that disc (DC alone) is the only retained energy.
    oracle = direct_dft_centered(p)
    nonzero = np.argwhere(np.abs(oracle) > 1e-6)
    assert sorted(map(tuple, nonzero)) == [(0, 0), (8, 8)]
    out = ifft2d_magnitude(low_pass(fft2d_centered(p), 0.05))
    np.testing.assert_allclose(out, 127.5, atol=1e-6)


@pytest.mark.parametrize("lam", [0.0, 1.0, -0.2, 1.5])
def test_low_pass_rejects_lambda(lam):
    with pytest.raises(InvalidLambda):
        low_pass(np.zeros((4, 4), complex), lam)


def test_low_pass_idempotent(rng):
    F = fft2d_centered(rng.uniform(0, 255, (33, 20)))
    once = low_pass(F, 0.2)
    np.testing.assert_array_equal(low_pass(once, 0.2), once)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.01, 0.98), st.floats(0.01, 0.98))
def test_low_pass_monotone(l1, l2):
    l1, l2 = sorted((l1, l2))
    F = fft2d_centered(np.random.default_rng(3).uniform(0, 255, (24, 24)))
    a, b = low_pass(F, l1), low_pass(F, l2)
    assert np.all((a != 0) <= (b != 0) | (F == 0))
    assert np.sum(np.abs(a) ** 2) <= np.sum(np.abs(b) ** 2) * (1 + 1e-12)


def test_conjugate_symmetry(rng):
    H, W = 16, 16
    F = fft2d_centered(rng.uniform(0, 255, (H, W)))
    # With even sides, index (a, b) pairs with (-a, -b) mod N around the centre.
    for a in range(1, H):
        for b in range(1, W):
            assert F[a, b] == pytest.approx(np.conj(F[H - a, W - b]), rel=1e-6, abs=1e-6)


def test_csv_exports(tmp_path):
    p = np.full((8, 8), 10.0)
    E = energy_curve(fft2d_centered(p))
    text = write_energy_curve_csv(tmp_path / "e.csv", E).read_text().splitlines()
    assert text[0] == "r,energy" and len(text) == len(E) + 1
    rep = band_report(E, p.shape)
    rows = write_band_reports_csv(tmp_path / "b.csv", [("flat", rep)]).read_text().splitlines()
    assert rows[0].startswith("label,low,mid,high") and rows[1].startswith("flat,")
