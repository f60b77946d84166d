"""Run configuration: one JSON file with a section per subcommand."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .client import EndpointConfig
from .dataset import Charset, DatasetSpec
from .errors import ConfigError, DataError, IllusionKitError, MissingGlyph
from .glyphs import check_coverage, default_font_path
from .perception import BlurHistConfig, FilteredConfig, SmspSchedule
from .scales import ScaleClass


@dataclass
class RunConfig:
    seed: int = 0
    dataset: dict = field(default_factory=dict)
    schedule: dict = field(default_factory=dict)
    baselines: dict = field(default_factory=dict)
    endpoints: dict = field(default_factory=dict)
    bench: dict = field(default_factory=dict)
    report: dict = field(default_factory=dict)
    base_dir: Path = field(default_factory=Path.cwd)

    @classmethod
    def load(cls, path=None, **overrides) -> "RunConfig":
        data, base = {}, Path.cwd()
        if path is not None:
            path = Path(path)
            try:
                data = json.loads(path.read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read config {path}: {exc}") from exc
            base = path.parent
        unknown = set(data) - {"seed", "dataset", "schedule", "baselines", "endpoints", "bench", "report"}
        if unknown:
            raise ConfigError(f"unknown config sections: {sorted(unknown)}")
        cfg = cls(base_dir=base, **data)
        for key, value in overrides.items():
            if value is None:
                continue
            section, _, name = key.partition(".")
            if name:
                getattr(cfg, section)[name] = value
            else:
                setattr(cfg, section, value)
        return cfg

    def path(self, p) -> Path:
        p = Path(p)
        return p if p.is_absolute() else self.base_dir / p

    # --- typed views -------------------------------------------------------------

    def smsp_schedule(self) -> SmspSchedule:
        try:
            return SmspSchedule.from_dict(self.schedule)
        except (IllusionKitError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid schedule: {exc}") from exc

    def filtered(self) -> FilteredConfig:
        try:
            return FilteredConfig(**self.baselines.get("filtered", {}))
        except TypeError as exc:
            raise ConfigError(f"invalid filtered baseline settings: {exc}") from exc

    def blur_hist(self) -> BlurHistConfig:
        try:
            return BlurHistConfig(**self.baselines.get("blur_hist", {}))
        except TypeError as exc:
            raise ConfigError(f"invalid blur_hist baseline settings: {exc}") from exc

    def font_path(self) -> Path:
        font = self.dataset.get("font")
        if font is None:
            return default_font_path()
        p = self.path(font)
        if not p.is_file():
            raise ConfigError(f"font not found: {p}")
        return p

    def out_dir(self) -> Path:
        return self.path(self.dataset.get("out_dir", "corpus"))

    def dataset_spec(self) -> DatasetSpec:
        d = self.dataset
        charsets = []
        for entry in d.get("charsets", [{"source": "digits"}]):
            if isinstance(entry, str):
                entry = {"source": entry}
            src = entry["source"]
            if src not in ("digits", "letters", "chinese"):
                src = str(self.path(src))
            try:
                charsets.append(Charset.load(src, entry.get("hidden_type")))
            except (OSError, DataError) as exc:
                raise ConfigError(f"charset {entry['source']}: {exc}") from exc
        textures = {}
        for kind, pair in d.get("textures", {}).items():
            textures[kind.upper()] = (pair["p_c"], pair["p_b"])
        try:
            scales = tuple(ScaleClass.parse(s) for s in d.get("scales", ["Large"]))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return DatasetSpec(
            charsets=charsets,
            backgrounds=tuple(b.lower() for b in d.get("backgrounds", ["vg", "gn", "hd", "ln", "mn"])),
            scales=scales,
            canvas=tuple(d.get("canvas", (1000, 1000))),
            font=str(self.font_path()),
            textures=textures,
            workers=int(d.get("workers", 1)),
        )

    def endpoint(self, role: str) -> EndpointConfig | None:
        d = self.endpoints.get(role)
        return EndpointConfig.from_dict(d) if d else None

    # --- validation ----------------------------------------------------------------

    def validate_generate(self) -> DatasetSpec:
        """Check fonts, glyph coverage, output dir and schedule before any work."""
        spec = self.dataset_spec()
        self.smsp_schedule()
        for cs in spec.charsets:
            for entry in cs.entries:
                try:
                    check_coverage(entry, spec.font)
                except MissingGlyph as exc:
                    raise ConfigError(f"charset {cs.name}: {exc}") from exc
        out = self.out_dir()
        probe = out
        while not probe.exists():
            probe = probe.parent
        if not os.access(probe, os.W_OK):
            raise ConfigError(f"output directory is not writable: {out}")
        return spec
