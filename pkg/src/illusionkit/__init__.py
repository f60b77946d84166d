"""illusionkit
===========

Tools for hidden-character visual illusions:

- :mod:`illusionkit.glyphs`, :mod:`illusionkit.textures`,
  :mod:`illusionkit.dataset` build original and noise-background images
  and index them in a JSON-lines manifest;
- :mod:`illusionkit.spectral` measures where an image keeps its spectral
  energy;
- :mod:`illusionkit.perception` produces low-passed, shrunken variants of
  an image and the multi-view tuple fed to a vision-language model, plus
  the blur-based baselines;
- :mod:`illusionkit.client`, :mod:`illusionkit.bench` and
  :mod:`illusionkit.scoring` query chat endpoints and score the answers.
"""
from .imaging import pad_center_white, quantize, read_png, resize, to_gray, write_png
from .glyphs import GlyphLayout, binary_mask, render_characters
from .scales import ScaleClass, classify_scale
from .spectral import (
    BandReport, band_report, energy_curve, fft2d_centered, ifft2d_magnitude, low_pass,
    plane_band_report,
)
from .perception import (
    BlurHistConfig, FilteredConfig, PerceptionParams, SmspSchedule, ablate,
    baseline_blur_histogram, baseline_filtered, build_schedule, build_smsp_input, perceive,
    perceive_plane,
)
from .textures import DEFAULT_PARAMS, KINDS, compose_illusion, generate_texture, region_fidelity
from .dataset import (
    Charset, DatasetSpec, SampleRecord, build_dataset, import_semantic, read_manifest,
    write_manifest,
)
from .prompts import render_judge_prompt, render_prompt
from .scoring import (
    BenchReport, EvalRecord, Verdict, aggregate, cost_model, fit_cost_model, judge, score,
    string_match,
)
from .client import ChatClient, EndpointConfig, MockEndpoint, VisionRequest, VisionResponse, send
from .bench import run_bench

__version__ = "0.1.0"
