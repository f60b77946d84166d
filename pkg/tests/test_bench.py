import numpy as np
import pytest

from illusionkit.bench import prepare_images, prompt_kind, run_bench
from illusionkit.client import ChatClient, EndpointConfig, MockEndpoint, count_images, prompt_text
from illusionkit.dataset import SampleRecord
from illusionkit.errors import AuthFailed, UnknownKind
from illusionkit.imaging import write_png
from illusionkit.perception import build_schedule
from illusionkit.scoring import read_records


def _corpus(tmp_path, n):
    rng = np.random.default_rng(0)
    recs = []
    for i in range(n):
        rel = f"images/s{i:03d}.png"
        write_png(tmp_path / rel, rng.integers(0, 256, (40, 40), dtype=np.uint8))
        recs.append(SampleRecord(f"s{i:03d}", str(i % 10), "digit", "gn", "Large", i, {}, rel))
    return recs


def _client(ep, **kw):
    cfg = EndpointConfig(base_url="http://mock/v1", model_name="m", api_key_env="", **kw)
    return ChatClient(cfg, transport=ep, sleep=lambda s: None)


def _answer_truth(body):
    return "images=%d" % count_images(body)


@pytest.mark.parametrize("method, n_images, template", [
    ("vanilla", 1, "There is a number"),
    ("cot", 1, "number"),
    ("filtered", 1, "There is a number"),
    ("blur_hist", 1, "There is a number"),
    ("smsp", 4, "four views"),
    ("ablation:single_variant:2", 2, "two views"),
    ("ablation:no_filter", 4, "four views"),
])
def test_request_shapes(tmp_path, method, n_images, template):
    manifest = _corpus(tmp_path, 2)
    ep = MockEndpoint()
    run_bench(manifest, method, _client(ep), tmp_path / "r.jsonl", manifest_dir=tmp_path)
    assert ep.request_count == 2
    for body in ep.bodies:
        assert count_images(body) == n_images
        assert template in prompt_text(body)


def test_prepare_images_smsp_first_is_original():
    img = np.random.default_rng(1).integers(0, 256, (30, 30), dtype=np.uint8)
    out = prepare_images(img, "smsp", build_schedule(4))
    assert len(out) == 5 and out[0] is img
    with pytest.raises(UnknownKind):
        prepare_images(img, "magic")
    assert prompt_kind("ablation:no_rescale") == "smsp"


def test_scores_and_usage(tmp_path):
    manifest = _corpus(tmp_path, 4)
    answers = iter(["It is 0", "It is 7", "It is 2", "It is 3"])
    ep = MockEndpoint(responder=lambda body: next(answers))
    recs = run_bench(manifest, "vanilla", _client(ep, max_concurrent_requests=1), tmp_path / "r.jsonl",
                     manifest_dir=tmp_path, judge_client=lambda p: "Correct" if "It is 7" not in p else "Incorrect")
    assert [r.verdict for r in recs] == ["Correct", "Incorrect", "Correct", "Correct"]
    assert all(r.usage.input_tokens == 60 + 963 for r in recs)
    assert len(read_records(tmp_path / "r.jsonl")) == 4


def test_resume_issues_only_missing_requests(tmp_path):
    manifest = _corpus(tmp_path, 100)
    out = tmp_path / "r.jsonl"
    ep = MockEndpoint()
    client = _client(ep, requests_per_minute=10_000)
    run_bench(manifest, "smsp", client, out, manifest_dir=tmp_path, limit=50)
    assert ep.request_count == 50
    run_bench(manifest, "smsp", client, out, manifest_dir=tmp_path)
    assert ep.request_count == 100
    assert {r.sample_id for r in read_records(out)} == {s.id for s in manifest}
    run_bench(manifest, "smsp", client, out, manifest_dir=tmp_path)
    assert ep.request_count == 100


def test_client_errors_recorded_and_retried(tmp_path):
    manifest = _corpus(tmp_path, 3)
    out = tmp_path / "r.jsonl"
    ep = MockEndpoint(statuses=[400])
    run_bench(manifest, "vanilla", _client(ep, max_concurrent_requests=1), out, manifest_dir=tmp_path)
    recs = read_records(out)
    assert recs[0].flags == ["client_error:ProtocolError"] and recs[0].verdict == "Incorrect"
    run_bench(manifest, "vanilla", _client(ep), out, manifest_dir=tmp_path)
    assert ep.request_count == 4


def test_retry_flag(tmp_path):
    manifest = _corpus(tmp_path, 1)
    ep = MockEndpoint(statuses=[503])
    recs = run_bench(manifest, "vanilla", _client(ep), tmp_path / "r.jsonl", manifest_dir=tmp_path)
    assert "retries:1" in recs[0].flags


def test_auth_failure_aborts(tmp_path):
    manifest = _corpus(tmp_path, 3)
    with pytest.raises(AuthFailed):
        run_bench(manifest, "vanilla", _client(MockEndpoint(statuses=[401] * 3)),
                  tmp_path / "r.jsonl", manifest_dir=tmp_path)
