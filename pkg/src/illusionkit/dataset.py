"""Corpus construction: originals, noise illusions, imported semantic images
and the JSON-lines manifest that indexes them."""
from __future__ import annotations

import csv
import hashlib
import json
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

from .errors import DataError, MissingTruth, UnreadableImage
from .glyphs import binary_mask, default_font_path, render_characters
from .imaging import read_png, write_png
from .scales import ScaleClass, classify_scale
from .textures import DEFAULT_PARAMS, KINDS, compose_illusion, params_from_dict, params_to_dict

HIDDEN_TYPES = ("digit", "letter", "chinese", "word", "pattern")
NOISE_BACKGROUNDS = tuple(k.lower() for k in KINDS)
BACKGROUNDS = ("origin",) + NOISE_BACKGROUNDS + ("semantic_import",)
SEMANTIC_THEMES = ("TC", "CC", "WV")
MANIFEST_NAME = "manifest.jsonl"

BUILTIN_CHARSETS = {"digits": "digit", "letters": "letter", "chinese": "chinese"}


@dataclass
class SampleRecord:
    id: str
    truth: str
    hidden_type: str
    background: str
    scale: str
    seed: int
    gen_params: dict = field(default_factory=dict)
    image_path: str = ""

    def to_json(self) -> str:
        return json.dumps(asdict(self), ensure_ascii=False)

    @classmethod
    def from_dict(cls, d) -> "SampleRecord":
        try:
            rec = cls(
                id=str(d["id"]),
                truth=str(d["truth"]),
                hidden_type=str(d["hidden_type"]),
                background=str(d["background"]),
                scale=ScaleClass.parse(d["scale"]).value,
                seed=int(d["seed"]),
                gen_params=dict(d.get("gen_params") or {}),
                image_path=str(d["image_path"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed manifest record {d!r}: {exc}") from exc
        if rec.hidden_type not in HIDDEN_TYPES:
            raise DataError(f"{rec.id}: unknown hidden_type {rec.hidden_type!r}")
        if rec.background not in BACKGROUNDS:
            raise DataError(f"{rec.id}: unknown background {rec.background!r}")
        return rec


def write_manifest(path, records) -> Path:
    path = Path(path)
    ids = [r.id for r in records]
    if len(ids) != len(set(ids)):
        dup = next(i for i, c in Counter(ids).items() if c > 1)
        raise DataError(f"duplicate sample id {dup!r}")
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            fh.write(r.to_json() + "\n")
    return path


def read_manifest(path) -> list:
    records = []
    with Path(path).open(encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                records.append(SampleRecord.from_dict(json.loads(line)))
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{n}: {exc}") from exc
    return records


def read_charset(path_or_name) -> list:
    """Entries of a charset file, or of a built-in set (digits/letters/chinese).

    One entry per line; ``#`` starts a comment line and anything after a tab
    is an annotation.
    """
    name = str(path_or_name)
    if name in BUILTIN_CHARSETS:
        text = resources.files("illusionkit.data").joinpath(f"{name}.txt").read_text("utf-8")
    else:
        text = Path(name).read_text(encoding="utf-8")
    out = []
    for line in text.splitlines():
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        out.append(line.split("\t", 1)[0].strip())
    return out


@dataclass
class Charset:
    hidden_type: str
    entries: list
    name: str = ""

    @classmethod
    def load(cls, source, hidden_type=None) -> "Charset":
        hidden_type = hidden_type or BUILTIN_CHARSETS.get(str(source))
        if hidden_type not in HIDDEN_TYPES:
            raise DataError(f"charset {source}: hidden_type must be one of {HIDDEN_TYPES}")
        return cls(hidden_type, read_charset(source), str(source))


@dataclass
class DatasetSpec:
    charsets: list
    backgrounds: tuple = NOISE_BACKGROUNDS
    scales: tuple = (ScaleClass.LARGE,)
    canvas: tuple = (1000, 1000)
    font: str | None = None
    textures: dict = field(default_factory=dict)  # kind -> (p_c, p_b)
    workers: int = 1

    def texture_params(self, kind):
        kind = kind.upper()
        pc, pb = self.textures.get(kind, DEFAULT_PARAMS[kind])
        return params_from_dict(kind, pc), params_from_dict(kind, pb)


def derive_seed(master_seed: int, key: str) -> int:
    """Per-sample 63-bit seed from the master seed and a sample key."""
    digest = hashlib.sha256(f"{int(master_seed)}:{key}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def _generate_group(spec, out_dir, master_seed, font, hidden_type, idx, truth, scale):
    base = f"{hidden_type}-{idx:03d}-{scale.short}"
    written, records = [], []
    original, layout = render_characters(truth, spec.canvas, font, scale)
    origin_id = f"{base}-origin"
    rel = f"images/{origin_id}.png"
    written.append(write_png(out_dir / rel, original))
    records.append(SampleRecord(
        id=origin_id, truth=truth, hidden_type=hidden_type, background="origin",
        scale=classify_scale(layout).value, seed=0,
        gen_params={
            "font": Path(font).name, "font_size": layout.font_size,
            "bbox": list(layout.bbox), "origin": list(layout.origin), "canvas": list(spec.canvas),
        },
        image_path=rel,
    ))
    mask = binary_mask(original)
    for bg in spec.backgrounds:
        kind = bg.upper()
        pc, pb = spec.texture_params(kind)
        sid = f"{base}-{bg}"
        seed = derive_seed(master_seed, sid)
        ill = compose_illusion(mask, kind, pc, pb, seed, font)
        rel = f"images/{sid}.png"
        written.append(write_png(out_dir / rel, ill))
        records.append(SampleRecord(
            id=sid, truth=truth, hidden_type=hidden_type, background=bg,
            scale=records[0].scale, seed=seed,
            gen_params={"texture": kind, "p_c": params_to_dict(pc), "p_b": params_to_dict(pb),
                        "origin_id": origin_id, "canvas": list(spec.canvas)},
            image_path=rel,
        ))
    return records, written


def build_dataset(spec: DatasetSpec, out_dir, seed: int = 0):
    """Render originals and noise illusions for every (entry, scale, background).

    Writes PNGs under ``out_dir/images`` and ``out_dir/manifest.jsonl``;
    returns ``(records, manifest_path)``. On failure every file written by
    this call is removed before the exception propagates.
    """
    out_dir = Path(out_dir)
    font = str(spec.font or default_font_path())
    for bg in spec.backgrounds:
        if bg not in NOISE_BACKGROUNDS:
            raise DataError(f"background {bg!r} cannot be generated; expected one of {NOISE_BACKGROUNDS}")
    jobs = []
    for cs in spec.charsets:
        for idx, truth in enumerate(cs.entries):
            for scale in spec.scales:
                jobs.append((cs.hidden_type, idx, truth, ScaleClass.parse(scale)))
    written = []
    manifest_path = out_dir / MANIFEST_NAME
    try:
        with ThreadPoolExecutor(max_workers=max(1, spec.workers)) as pool:
            futures = [pool.submit(_generate_group, spec, out_dir, seed, font, *job) for job in jobs]
            records = []
            errors = []
            for fut in futures:
                try:
                    recs, files = fut.result()
                except Exception as exc:  # collect, clean up after all workers stop
                    errors.append(exc)
                    continue
                records.extend(recs)
                written.extend(files)
            if errors:
                raise errors[0]
        write_manifest(manifest_path, records)
    except BaseException:
        for p in written:
            Path(p).unlink(missing_ok=True)
        manifest_path.unlink(missing_ok=True)
        raise
    return records, manifest_path


def category_counts(records) -> dict:
    """Counts keyed by ``(scale, column)`` using the dataset-table columns."""
    counts = Counter()
    for r in records:
        if r.background == "semantic_import":
            col = str(r.gen_params.get("theme", "semantic")).upper()
        elif r.background == "origin":
            col = "Origin"
        else:
            col = r.background.upper()
        counts[(r.scale, col)] += 1
    return dict(counts)


def format_counts(records) -> str:
    counts = category_counts(records)
    cols = ["Origin", *SEMANTIC_THEMES, *KINDS]
    extra = sorted({c for _, c in counts} - set(cols))
    cols += extra
    scales = [s.value for s in ScaleClass if any(k[0] == s.value for k in counts)]
    lines = [f"{'':<13}" + "".join(f"{c:>8}" for c in cols)]
    for s in scales:
        lines.append(f"{s:<13}" + "".join(f"{counts.get((s, c), 0):>8}" for c in cols))
    return "\n".join(lines)


def import_semantic(images_dir, truths_file, manifest_dir=None) -> list:
    """Manifest entries for externally generated semantic-background images.

    ``truths_file`` is a TSV with columns ``filename``, ``truth`` and the
    optional ``hidden_type``, ``scale`` and ``theme``. Images are only read
    for validation, never modified.
    """
    images_dir = Path(images_dir)
    manifest_dir = Path(manifest_dir) if manifest_dir else images_dir
    truths = {}
    with Path(truths_file).open(encoding="utf-8", newline="") as fh:
        for row in csv.reader(fh, delimiter="\t"):
            if not row or row[0].startswith("#"):
                continue
            if row[0] == "filename":
                continue
            truths[row[0]] = row[1:]
    records = []
    for path in sorted(p for p in images_dir.iterdir() if p.is_file() and not p.name.startswith(".")):
        if path.name == Path(truths_file).name and path.parent == Path(truths_file).parent:
            continue
        if path.name not in truths:
            raise MissingTruth(f"no truth entry for image {path.name}")
        try:
            read_png(path)
        except Exception as exc:
            raise UnreadableImage(f"cannot read image {path.name}: {exc}") from exc
        fields = truths[path.name] + [""] * 4
        truth, hidden_type, scale, theme = fields[:4]
        gen = {"source": path.name}
        if theme:
            gen["theme"] = theme
        records.append(SampleRecord(
            id=f"semantic-{path.stem}", truth=truth, hidden_type=hidden_type or "word",
            background="semantic_import",
            scale=ScaleClass.parse(scale).value if scale else ScaleClass.UNCLASSIFIED.value,
            seed=0, gen_params=gen,
            image_path=Path(path.resolve()).relative_to(manifest_dir.resolve()).as_posix()
            if path.resolve().is_relative_to(manifest_dir.resolve()) else str(path.resolve()),
        ))
    for rec in records:
        SampleRecord.from_dict(asdict(rec))
    return records
