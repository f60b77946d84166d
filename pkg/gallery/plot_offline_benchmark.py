"""
An offline benchmark run
========================

The runner talks to any OpenAI-compatible chat endpoint. Here an
in-process mock stands in for the model: it "reads" the character only
when given the multi-view tuple, which is enough to exercise prompting,
scoring, resumable records and the accuracy table without a network.

"""

import os
import tempfile
from pathlib import Path

from illusionkit.bench import run_bench
from illusionkit.client import ChatClient, EndpointConfig, MockEndpoint, count_images, prompt_text
from illusionkit.dataset import Charset, DatasetSpec, build_dataset
from illusionkit.scoring import aggregate, read_records

work = Path(os.environ.get("ILLUSIONKIT_GALLERY_OUT", tempfile.mkdtemp(prefix="gallery-"))) / "bench"
spec = DatasetSpec(charsets=[Charset.load("digits")], backgrounds=("vg", "hd"), canvas=(200, 200))
samples, manifest = build_dataset(spec, work, seed=0)
truth_of = {s.id: s.truth for s in samples}

###############################################################################
# The mock answers correctly for multi-image requests and guesses otherwise

order = iter(s.id for s in samples)


def model(body):
    sid = next(order)
    return f"The number is {truth_of[sid]}." if count_images(body) > 1 else "I only see stripes."


def judge(body):
    text = prompt_text(body)
    truth = text.split("Ground Truth Answer: ")[-1].split("\n")[0]
    response = text.split("Model Response: ")[-1].split("\n")[0]
    return "Correct" if f" {truth}." in response else "Incorrect"


cfg = EndpointConfig(base_url="http://mock/v1", model_name="mock", api_key_env="",
                     max_concurrent_requests=1)
records = work / "records.jsonl"
with ChatClient(cfg, transport=MockEndpoint(responder=model)) as client, \
        ChatClient(cfg, transport=MockEndpoint(responder=judge)) as judge_client:
    for method in ("vanilla", "smsp"):
        order = iter(s.id for s in samples)
        run_bench(samples, method, client, records, manifest_dir=work, judge_client=judge_client)

###############################################################################
# Aggregate into the Origin / Noise / Semantic x scale table

report = aggregate(read_records(records), samples)
print(report.format_table())
