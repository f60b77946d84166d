"""
Where the hidden character lives in the spectrum
================================================

A plain rendered character is mostly flat white with a few edges, so
nearly all of its energy sits at the lowest frequencies. Once the same
glyph is drawn as a change of texture, the stripes, dots or noise push a
much larger share into the mid and high bands.

"""

import os
import tempfile
from pathlib import Path

import numpy as np

from illusionkit import glyphs, spectral, textures
from illusionkit.imaging import write_png

out = Path(os.environ.get("ILLUSIONKIT_GALLERY_OUT", tempfile.mkdtemp(prefix="gallery-")))
out.mkdir(parents=True, exist_ok=True)

###############################################################################
# Render one character and turn it into a mask

original, layout = glyphs.render_characters("8", canvas=(512, 512))
mask = glyphs.binary_mask(original)
print("ink box", layout.bbox, "font size", layout.font_size)

###############################################################################
# Compose the same mask with every texture family and compare band shares

rows = [("origin", spectral.plane_band_report(original))]
for kind in textures.KINDS:
    p_c, p_b = textures.DEFAULT_PARAMS[kind]
    ill = textures.compose_illusion(mask, kind, p_c, p_b, seed=0)
    write_png(out / f"eight_{kind.lower()}.png", ill)
    rows.append((kind, spectral.plane_band_report(ill)))

print(f"{'image':<8}{'low':>8}{'mid':>8}{'high':>8}")
for name, rep in rows:
    print(f"{name:<8}{rep.low_share:>8.4f}{rep.mid_share:>8.4f}{rep.high_share:>8.4f}")

###############################################################################
# The radial energy curve, normalised, can be exported for plotting elsewhere

F = spectral.fft2d_centered(original.astype(float))
curve = spectral.energy_curve(F)
spectral.write_energy_curve_csv(out / "origin_energy.csv", curve / curve.sum())
print("first radii:", np.round(curve[:4] / curve.sum(), 4))
print("outputs in", out)
