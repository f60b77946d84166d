"""Command-line entry point.

Exit codes: 0 success, 2 config/validation error, 3 data error,
4 endpoint error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import logging
import sys
from pathlib import Path

from .bench import METHODS, check_method, prepare_images, run_bench
from .client import ChatClient
from .config import RunConfig
from .dataset import build_dataset, format_counts, import_semantic, read_manifest, write_manifest
from .errors import ConfigError, DataError, EndpointError, IllusionKitError, UnknownKind
from .imaging import read_png, to_gray, write_png
from .perception import ablate
from .scoring import aggregate, load_stoplist, read_records, score, write_records
from .spectral import plane_band_report

log = logging.getLogger("illusionkit")

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff", ".webp"}


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def cmd_generate(cfg: RunConfig, out=sys.stdout) -> Path:
    spec = cfg.validate_generate()
    records, manifest = build_dataset(spec, cfg.out_dir(), cfg.seed)
    print(format_counts(records), file=out)
    print(f"manifest: {manifest} (sha256 {sha256_file(manifest)[:16]})", file=out)
    return manifest


def cmd_import(cfg: RunConfig, images_dir, truths, manifest, out=sys.stdout) -> Path:
    manifest = Path(manifest)
    existing = read_manifest(manifest) if manifest.exists() else []
    new = import_semantic(images_dir, truths, manifest.parent)
    write_manifest(manifest, existing + new)
    print(f"imported {len(new)} semantic samples into {manifest}", file=out)
    return manifest


def _list_images(inputs) -> list:
    files = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            files.extend(sorted(q for q in p.iterdir() if q.suffix.lower() in IMAGE_SUFFIXES))
        elif p.is_file():
            files.append(p)
        else:
            raise DataError(f"no such file or directory: {p}")
    return files


def cmd_process(cfg: RunConfig, inputs, mode: str, out_dir) -> list:
    """Write ``<stem>_v{i}.png`` files; ``v0`` is always the original."""
    schedule = cfg.smsp_schedule()
    method = mode
    try:
        check_method(method)
    except UnknownKind as exc:
        raise ConfigError(str(exc)) from exc
    if method in ("vanilla", "cot"):
        raise ConfigError(f"mode {mode!r} does not transform images")
    out_dir = Path(out_dir)
    files = _list_images(inputs)
    if not files:
        raise DataError("no input images")
    written = []
    for f in files:
        img = read_png(f)
        if method in ("filtered", "blur_hist"):
            variants = [(0, img), (1, prepare_images(img, method, schedule, cfg.filtered(), cfg.blur_hist())[0])]
        elif method.startswith("ablation:single_variant:"):
            idx = int(method.rsplit(":", 1)[1])
            pair = ablate(img, f"single_variant:{idx}", schedule)
            variants = [(0, pair[0]), (idx, pair[1])]
        else:
            variants = list(enumerate(prepare_images(img, method, schedule)))
        for i, v in variants:
            written.append(write_png(out_dir / f"{f.stem}_v{i}.png", v))
    return written


def cmd_analyze(inputs, out_csv) -> Path:
    """Band shares per image, or per origin/illusion pair for a manifest."""
    inputs = [Path(i) for i in inputs]
    if not inputs:
        raise ConfigError("no inputs to analyze")
    out_csv = Path(out_csv)
    if len(inputs) == 1 and inputs[0].suffix == ".jsonl":
        manifest = read_manifest(inputs[0])
        base = inputs[0].parent
        by_id = {r.id: r for r in manifest}
        cache = {}

        def share(rec):
            if rec.id not in cache:
                cache[rec.id] = plane_band_report(to_gray(read_png(base / rec.image_path)))
            return cache[rec.id]

        rows = []
        for rec in manifest:
            oid = rec.gen_params.get("origin_id")
            if rec.background == "origin" or oid is None:
                continue
            if oid not in by_id:
                raise DataError(f"{rec.id}: origin {oid!r} not in manifest")
            o, i = share(by_id[oid]), share(rec)
            rows.append({
                "origin_id": oid, "illusion_id": rec.id, "background": rec.background,
                "scale": rec.scale, "origin_mid_high_share": o.mid_high_share,
                "illusion_mid_high_share": i.mid_high_share,
                "illusion_gt_origin": int(i.mid_high_share > o.mid_high_share),
            })
        if not rows:
            raise DataError("manifest has no origin/illusion pairs")
        fields = list(rows[0])
    else:
        files = _list_images(inputs)
        if not files:
            raise ConfigError("no input images to analyze")
        rows = []
        for f in files:
            rep = plane_band_report(to_gray(read_png(f)))
            rows.append({"image": str(f), **rep.as_row(), "mid_high_share": rep.mid_high_share})
        fields = list(rows[0])
    out_csv.parent.mkdir(parents=True, exist_ok=True)
    with out_csv.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields)
        w.writeheader()
        w.writerows(rows)
    return out_csv


def _manifest_path(cfg: RunConfig, override=None) -> Path:
    if override:
        return Path(override)
    if cfg.bench.get("manifest"):
        return cfg.path(cfg.bench["manifest"])
    return cfg.out_dir() / "manifest.jsonl"


def cmd_bench(cfg: RunConfig, methods=None, manifest=None, records=None, transport=None,
              judge_transport=None, limit=None, out=sys.stdout):
    target = cfg.endpoint("target")
    if target is None:
        raise ConfigError("config has no endpoints.target section")
    methods = methods or cfg.bench.get("methods", ["vanilla", "smsp"])
    for m in methods:
        try:
            check_method(m)
        except UnknownKind as exc:
            raise ConfigError(str(exc)) from exc
    schedule = cfg.smsp_schedule()
    manifest = _manifest_path(cfg, manifest)
    if not manifest.exists():
        raise DataError(f"manifest not found: {manifest}")
    samples = read_manifest(manifest)
    records = Path(records) if records else cfg.path(cfg.bench.get("records", "records.jsonl"))
    stoplist = load_stoplist(cfg.bench.get("stoplist") and cfg.path(cfg.bench["stoplist"]))
    judge_cfg = cfg.endpoint("judge")
    judge = ChatClient(judge_cfg, transport=judge_transport) if judge_cfg else None
    try:
        with ChatClient(target, transport=transport) as client:
            for m in methods:
                new = run_bench(samples, m, client, records, manifest_dir=manifest.parent,
                                schedule=schedule, judge_client=judge, stoplist=stoplist,
                                filtered=cfg.filtered(), blur_hist=cfg.blur_hist(),
                                limit=limit if limit is not None else cfg.bench.get("limit"))
                print(f"{m}: {len(new)} new records", file=out)
    finally:
        if judge is not None:
            judge.close()
    return cmd_report(cfg, records, manifest, out=out)


def cmd_report(cfg: RunConfig, records, manifest, out=sys.stdout):
    if not Path(records).exists():
        raise DataError(f"records not found: {records}")
    recs = read_records(records)
    report = aggregate(recs, read_manifest(manifest))
    json_path = cfg.path(cfg.report.get("json", "report.json"))
    text_path = cfg.path(cfg.report.get("text", "report.txt"))
    json_path.parent.mkdir(parents=True, exist_ok=True)
    json_path.write_text(report.to_json() + "\n", encoding="utf-8")
    table = report.format_table()
    text_path.write_text(table + "\n", encoding="utf-8")
    print(table, file=out)
    return report


def cmd_judge_only(cfg: RunConfig, records, manifest, transport=None, out=sys.stdout) -> int:
    """Re-score records whose judge stage failed; returns how many changed."""
    judge_cfg = cfg.endpoint("judge")
    if judge_cfg is None:
        raise ConfigError("config has no endpoints.judge section")
    truths = {r.id: r.truth for r in read_manifest(manifest)}
    recs = read_records(records)
    stoplist = load_stoplist(cfg.bench.get("stoplist") and cfg.path(cfg.bench["stoplist"]))
    changed = 0
    with ChatClient(judge_cfg, transport=transport) as judge:
        for rec in recs:
            if not {"judge_unavailable", "judge_malformed"} & set(rec.flags):
                continue
            if rec.sample_id not in truths:
                raise DataError(f"record references unknown sample id {rec.sample_id!r}")
            verdict, used, flags = score(truths[rec.sample_id], rec.response, judge, stoplist)
            rec.verdict, rec.judge_used = verdict.value, used
            rec.flags = [f for f in rec.flags if not f.startswith("judge_")] + flags
            changed += 1
    write_records(records, recs)
    print(f"re-judged {changed} records", file=out)
    return changed


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="illusionkit", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def with_config(sp):
        sp.add_argument("-c", "--config", help="JSON run configuration")
        sp.add_argument("--seed", type=int, help="master seed (overrides config)")
        return sp

    g = with_config(sub.add_parser("generate", help="render originals and noise illusions"))
    g.add_argument("--out-dir")
    g.add_argument("--font")

    im = with_config(sub.add_parser("import", help="add semantic-background images to a manifest"))
    im.add_argument("images_dir")
    im.add_argument("truths", help="TSV: filename, truth[, hidden_type, scale, theme]")
    im.add_argument("--manifest", required=True)

    pr = with_config(sub.add_parser("process", help="write processed variants of images"))
    pr.add_argument("inputs", nargs="+")
    pr.add_argument("--mode", default="smsp",
                    help="smsp | filtered | blur_hist | ablation:no_filter | ablation:no_rescale | "
                         "ablation:single_variant:<i>")
    pr.add_argument("-o", "--out-dir", required=True)
    pr.add_argument("-k", type=int, help="number of variants (overrides config)")

    an = sub.add_parser("analyze", help="spectral band shares as CSV")
    an.add_argument("inputs", nargs="*")
    an.add_argument("-o", "--out", required=True)

    b = with_config(sub.add_parser("bench", help="query the target endpoint and score answers"))
    b.add_argument("--method", action="append", dest="methods")
    b.add_argument("--manifest")
    b.add_argument("--records")
    b.add_argument("--limit", type=int)

    r = with_config(sub.add_parser("report", help="aggregate records into an accuracy table"))
    r.add_argument("records")
    r.add_argument("manifest")

    j = with_config(sub.add_parser("judge-only", help="re-run the judge on flagged records"))
    j.add_argument("records")
    j.add_argument("manifest")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "analyze":
            cmd_analyze(args.inputs, args.out)
            return 0
        overrides = {"seed": args.seed}
        if args.command == "generate":
            overrides.update({"dataset.out_dir": args.out_dir and str(Path(args.out_dir).resolve()),
                              "dataset.font": args.font and str(Path(args.font).resolve())})
        if args.command == "process" and args.k is not None:
            overrides["schedule.k"] = args.k
        cfg = RunConfig.load(args.config, **overrides)
        if args.command == "generate":
            cmd_generate(cfg)
        elif args.command == "import":
            cmd_import(cfg, args.images_dir, args.truths, args.manifest)
        elif args.command == "process":
            cmd_process(cfg, args.inputs, args.mode, args.out_dir)
        elif args.command == "bench":
            cmd_bench(cfg, args.methods, args.manifest, args.records, limit=args.limit)
        elif args.command == "report":
            cmd_report(cfg, args.records, args.manifest)
        elif args.command == "judge-only":
            cmd_judge_only(cfg, args.records, args.manifest)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except EndpointError as exc:
        print(f"endpoint error: {exc}", file=sys.stderr)
        return 4
    except (DataError, IllusionKitError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
