"""
Multi-scale perceptual variants
===============================

Low-pass filtering followed by shrinking mimics looking at an image from
further away. A short geometric schedule of (cutoff, scale) pairs turns
one illusion into a tuple of views, each padded back onto a white canvas
of the original size.

"""

import os
import tempfile
from pathlib import Path

import numpy as np

from illusionkit import glyphs, perception, textures
from illusionkit.imaging import content_box, write_png

out = Path(os.environ.get("ILLUSIONKIT_GALLERY_OUT", tempfile.mkdtemp(prefix="gallery-")))
out.mkdir(parents=True, exist_ok=True)

original, _ = glyphs.render_characters("K", canvas=(600, 600))
mask = glyphs.binary_mask(original)
ill = textures.compose_illusion(mask, "HD", *textures.DEFAULT_PARAMS["HD"], seed=3)

###############################################################################
# The default schedule has three interior points between the two boundaries

sched = perception.build_schedule()
for p in sched:
    print(f"lambda={p.lam:.5f}  s={p.s:.3f}  content={p.scaled_dims(ill.shape)}")

###############################################################################
# Build the tuple; index 0 is always the untouched input

views = perception.build_smsp_input(ill, sched)
for i, v in enumerate(views):
    write_png(out / f"view_{i}.png", v)
for v, p in zip(views[1:], sched):
    top, left, h, w = content_box(v.shape, p.scaled_dims(v.shape))
    inked = (v[top:top + h, left:left + w] < 255).mean()
    print(f"box at ({top}, {left}) size {h}x{w}, non-white {inked:.2f}")

###############################################################################
# More variants follow the same geometric path

for k in (2, 4, 6):
    print(k, [round(p.s, 3) for p in perception.build_schedule(k)])

###############################################################################
# Ablations and the two classical baselines

no_filter = perception.ablate(ill, "no_filter", sched)
print("no_filter differs from full:", any(not np.array_equal(a, b) for a, b in zip(no_filter, views)))
write_png(out / "filtered.png", perception.baseline_filtered(ill))
write_png(out / "blur_hist.png", perception.baseline_blur_histogram(ill))
print("outputs in", out)
