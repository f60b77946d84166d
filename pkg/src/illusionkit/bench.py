"""Benchmark runner: preprocess, prompt, query, score, persist."""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .client import ChatClient, VisionRequest
from .errors import AuthFailed, DataError, EndpointError, UnknownKind
from .imaging import read_png
from .perception import (
    BlurHistConfig, FilteredConfig, SmspSchedule, ablate, baseline_blur_histogram,
    baseline_filtered, build_schedule, build_smsp_input,
)
from .prompts import render_prompt
from .scoring import EvalRecord, RecordSink, Usage, Verdict, read_records, score

log = logging.getLogger(__name__)

METHODS = ("vanilla", "cot", "filtered", "blur_hist", "smsp")
ABLATION_PREFIX = "ablation:"


def check_method(method: str) -> None:
    if method in METHODS:
        return
    if method.startswith(ABLATION_PREFIX):
        mode = method[len(ABLATION_PREFIX):]
        if mode in ("no_filter", "no_rescale") or mode.startswith("single_variant:"):
            return
    raise UnknownKind(f"unknown method {method!r}")


def prepare_images(img, method: str, schedule: SmspSchedule | None = None,
                   filtered: FilteredConfig = FilteredConfig(),
                   blur_hist: BlurHistConfig = BlurHistConfig()) -> list:
    """The image list sent to the model for ``method``, original first."""
    check_method(method)
    schedule = schedule or build_schedule()
    if method in ("vanilla", "cot"):
        return [img]
    if method == "filtered":
        return [baseline_filtered(img, filtered)]
    if method == "blur_hist":
        return [baseline_blur_histogram(img, blur_hist)]
    if method == "smsp":
        return build_smsp_input(img, schedule)
    return ablate(img, method[len(ABLATION_PREFIX):], schedule)


def prompt_kind(method: str) -> str:
    if method == "cot":
        return "cot"
    if method in ("vanilla", "filtered", "blur_hist"):
        return "vanilla"
    return "smsp"


def run_bench(manifest, method: str, client: ChatClient, out_path, *, manifest_dir=".",
              schedule: SmspSchedule | None = None, judge_client=None, stoplist=None,
              prompt_kinds: dict | None = None, filtered: FilteredConfig = FilteredConfig(),
              blur_hist: BlurHistConfig = BlurHistConfig(), limit: int | None = None) -> list:
    """Evaluate ``method`` on every manifest sample not yet scored in ``out_path``.

    Records are appended to ``out_path`` as they complete, so an interrupted
    run resumes where it stopped. Samples hitting an unrecoverable endpoint
    error are recorded as Incorrect with a ``client_error`` flag and retried
    on the next run; an authentication failure stops the run.
    """
    check_method(method)
    schedule = schedule or build_schedule()
    kind = (prompt_kinds or {}).get(method, prompt_kind(method))
    done = {
        r.sample_id for r in read_records(out_path)
        if r.method == method and not any(f.startswith("client_error") for f in r.flags)
    }
    todo = [s for s in manifest if s.id not in done]
    if limit is not None:
        todo = todo[:limit]
    sink = RecordSink(out_path)
    base = Path(manifest_dir)

    def one(sample):
        try:
            img = read_png(base / sample.image_path)
        except (OSError, ValueError) as exc:
            raise DataError(f"{sample.id}: cannot read {sample.image_path}: {exc}") from exc
        images = prepare_images(img, method, schedule, filtered, blur_hist)
        prompt = render_prompt(kind, sample.hidden_type, n_views=len(images))
        try:
            resp = client.send(VisionRequest(prompt=prompt, images=images))
        except AuthFailed:
            raise
        except EndpointError as exc:
            log.error("%s: %s", sample.id, exc)
            rec = EvalRecord(sample.id, method, "", Verdict.INCORRECT.value,
                             flags=[f"client_error:{type(exc).__name__}"])
            sink.append(rec)
            return rec
        verdict, judged, flags = score(sample.truth, resp.text, judge_client, stoplist)
        if resp.retry_count:
            flags = flags + [f"retries:{resp.retry_count}"]
        rec = EvalRecord(sample.id, method, resp.text, verdict.value, judged,
                         Usage(resp.input_tokens, resp.output_tokens, resp.latency_s), flags)
        sink.append(rec)
        return rec

    workers = max(1, client.cfg.max_concurrent_requests)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, todo))
