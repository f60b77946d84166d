"""Hybrid answer scoring, accuracy aggregation and cost accounting."""
from __future__ import annotations

import enum
import json
import re
import threading
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .errors import DataError, EndpointError, JudgeUnavailable, MalformedJudgeOutput, UnknownSample
from .prompts import render_judge_prompt


class Verdict(str, enum.Enum):
    CORRECT = "Correct"
    INCORRECT = "Incorrect"
    NEEDS_JUDGE = "NeedsJudge"


def default_stoplist() -> frozenset:
    text = resources.files("illusionkit.data").joinpath("stoplist.txt").read_text("utf-8")
    return frozenset(
        line.strip().casefold() for line in text.splitlines() if line.strip() and not line.startswith("#")
    )


def load_stoplist(path=None) -> frozenset:
    if path is None:
        return default_stoplist()
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return frozenset(l.strip().casefold() for l in lines if l.strip() and not l.startswith("#"))


def string_match(truth: str, response: str, stoplist=None) -> Verdict:
    """First stage of scoring: containment rules.

    Matching is case-insensitive (``str.casefold``), which leaves CJK text
    untouched. Short truths and common strings defer to the judge.
    """
    if not truth:
        raise ValueError("truth must be non-empty")
    stoplist = default_stoplist() if stoplist is None else stoplist
    y, y_star = truth.casefold(), (response or "").casefold()
    if y not in y_star:
        return Verdict.INCORRECT
    if len(y) >= 3 and y not in stoplist:
        return Verdict.CORRECT
    return Verdict.NEEDS_JUDGE


_JUDGE_TOKEN = re.compile(r"\b(incorrect|correct)\b", re.IGNORECASE)


def parse_judge_output(text: str) -> Verdict:
    m = _JUDGE_TOKEN.search(text or "")
    if m is None:
        raise MalformedJudgeOutput(f"judge output has no verdict: {text!r}")
    return Verdict.INCORRECT if m.group(1).lower() == "incorrect" else Verdict.CORRECT


def judge(truth: str, response: str, judge_client) -> Verdict:
    """Ask a judge model. ``judge_client`` is any callable ``prompt -> text``."""
    if judge_client is None:
        raise JudgeUnavailable("no judge client configured")
    try:
        reply = judge_client(render_judge_prompt(truth, response))
    except EndpointError as exc:
        raise JudgeUnavailable(f"judge call failed: {exc}") from exc
    return parse_judge_output(reply)


@dataclass
class Usage:
    input_tokens: int | None = None
    output_tokens: int | None = None
    latency_s: float | None = None


@dataclass
class EvalRecord:
    sample_id: str
    method: str
    response: str
    verdict: str
    judge_used: bool = False
    usage: Usage = field(default_factory=Usage)
    flags: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), ensure_ascii=False)

    @classmethod
    def from_dict(cls, d) -> "EvalRecord":
        try:
            return cls(
                sample_id=str(d["sample_id"]), method=str(d["method"]), response=str(d.get("response", "")),
                verdict=Verdict(d["verdict"]).value, judge_used=bool(d.get("judge_used", False)),
                usage=Usage(**(d.get("usage") or {})), flags=list(d.get("flags") or []),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed eval record {d!r}: {exc}") from exc


def score(truth: str, response: str, judge_client=None, stoplist=None):
    """Full verdict pipeline; always ends in Correct or Incorrect.

    Returns ``(verdict, judge_used, flags)``. Judge outages and unparseable
    judge replies are scored Incorrect and flagged.
    """
    v = string_match(truth, response, stoplist)
    if v is not Verdict.NEEDS_JUDGE:
        return v, False, []
    try:
        return judge(truth, response, judge_client), True, []
    except JudgeUnavailable:
        return Verdict.INCORRECT, True, ["judge_unavailable"]
    except MalformedJudgeOutput:
        return Verdict.INCORRECT, True, ["judge_malformed"]


def read_records(path) -> list:
    out = []
    p = Path(path)
    if not p.exists():
        return out
    lines = p.read_text(encoding="utf-8").splitlines()
    for n, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            out.append(EvalRecord.from_dict(json.loads(line)))
        except json.JSONDecodeError as exc:
            # A torn final line from an interrupted run is dropped.
            if n == len(lines):
                break
            raise DataError(f"{path}:{n}: {exc}") from exc
    return out


class RecordSink:
    """Serialised JSON-lines appender; each record is one ``write`` call."""

    def __init__(self, path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        if self.path.exists():
            data = self.path.read_bytes()
            if data and not data.endswith(b"\n"):
                # Drop a torn trailing line left by an interrupted run.
                self.path.write_bytes(data[: data.rfind(b"\n") + 1])

    def append(self, record: EvalRecord) -> None:
        data = (record.to_json() + "\n").encode("utf-8")
        with self._lock, self.path.open("ab") as fh:
            fh.write(data)
            fh.flush()


def write_records(path, records) -> Path:
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with tmp.open("w", encoding="utf-8") as fh:
        for r in records:
            fh.write(r.to_json() + "\n")
    tmp.replace(path)
    return path


# --- aggregation -----------------------------------------------------------------

GROUPS = ("Origin", "Noise", "Semantic")
SCALE_COLUMNS = ("L", "M", "S")
_SCALE_SHORT = {"Large": "L", "Medium": "M", "Small": "S"}


def background_group(background: str) -> str:
    if background == "origin":
        return "Origin"
    if background == "semantic_import":
        return "Semantic"
    return "Noise"


@dataclass
class BenchReport:
    # method -> group -> column ("L", "M", "S", "Avg") -> accuracy or None
    accuracy: dict
    # method -> group -> column -> (correct, total)
    counts: dict
    # method -> {"n", "mean_input_tokens", "mean_output_tokens", "mean_latency_s"}
    cost: dict

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "counts": {m: {g: {c: list(v) for c, v in cols.items()} for g, cols in gs.items()}
                       for m, gs in self.counts.items()},
            "cost": self.cost,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    def format_table(self) -> str:
        """Fixed-width accuracy table, Origin/Noise/Semantic x L/M/S/Avg."""
        cols = [(g, c) for g in GROUPS for c in (*SCALE_COLUMNS, "Avg")]
        width = max([len("Method")] + [len(m) for m in self.accuracy]) + 2
        head1 = " " * width + "".join(f"{g:<28}" for g in GROUPS)
        head2 = f"{'Method':<{width}}" + "".join(f"{c:>7}" for _, c in cols)
        lines = [head1.rstrip(), head2]
        for method, groups in self.accuracy.items():
            cells = []
            for g, c in cols:
                v = groups.get(g, {}).get(c)
                cells.append(f"{'-':>7}" if v is None else f"{v:>7.1f}")
            lines.append(f"{method:<{width}}" + "".join(cells))
        if self.cost:
            lines.append("")
            lines.append(f"{'Method':<{width}}{'n':>6}{'in_tok':>10}{'out_tok':>10}{'latency_s':>11}")
            for method, c in self.cost.items():
                def fmt(v, spec):
                    return f"{'-':>{spec[0]}}" if v is None else f"{v:>{spec[0]}.{spec[1]}f}"
                lines.append(
                    f"{method:<{width}}{c['n']:>6}" + fmt(c["mean_input_tokens"], (10, 1))
                    + fmt(c["mean_output_tokens"], (10, 1)) + fmt(c["mean_latency_s"], (11, 2))
                )
        return "\n".join(lines)


def _mean(values):
    values = [v for v in values if v is not None]
    return sum(values) / len(values) if values else None


def _is_client_error(rec) -> bool:
    return any(f.startswith("client_error") for f in rec.flags)


def aggregate(records, manifest) -> BenchReport:
    """Accuracy by (background group, scale) for each method, plus costs.

    Cells without samples are ``None``. ``Avg`` pools the L/M/S samples of a
    group; Unclassified-scale samples are left out of every cell. When a
    sample was scored more than once for a method, the later record counts.
    """
    by_id = manifest if isinstance(manifest, dict) else {r.id: r for r in manifest}
    latest = {}
    for rec in records:
        key = (rec.method, rec.sample_id)
        prev = latest.get(key)
        # A retried sample supersedes its earlier endpoint-error record.
        if prev is None or _is_client_error(prev) or not _is_client_error(rec):
            latest[key] = rec
    records = list(latest.values())
    tallies = defaultdict(lambda: defaultdict(lambda: [0, 0]))
    usage = defaultdict(list)
    for rec in records:
        sample = by_id.get(rec.sample_id)
        if sample is None:
            raise UnknownSample(f"record references unknown sample id {rec.sample_id!r}")
        usage[rec.method].append(rec.usage)
        col = _SCALE_SHORT.get(sample.scale)
        if col is None:
            continue
        cell = tallies[rec.method][(background_group(sample.background), col)]
        cell[0] += rec.verdict == Verdict.CORRECT.value
        cell[1] += 1

    accuracy, counts = {}, {}
    for method in sorted(set(tallies) | set(usage)):
        acc_m, cnt_m = {}, {}
        for g in GROUPS:
            acc_g, cnt_g = {}, {}
            tot_c = tot_n = 0
            for c in SCALE_COLUMNS:
                k, n = tallies[method].get((g, c), (0, 0))
                tot_c, tot_n = tot_c + k, tot_n + n
                acc_g[c] = 100.0 * k / n if n else None
                cnt_g[c] = (k, n)
            acc_g["Avg"] = 100.0 * tot_c / tot_n if tot_n else None
            cnt_g["Avg"] = (tot_c, tot_n)
            acc_m[g], cnt_m[g] = acc_g, cnt_g
        accuracy[method], counts[method] = acc_m, cnt_m

    cost = {
        m: {
            "n": len(us),
            "mean_input_tokens": _mean(u.input_tokens for u in us),
            "mean_output_tokens": _mean(u.output_tokens for u in us),
            "mean_latency_s": _mean(u.latency_s for u in us),
        }
        for m, us in sorted(usage.items())
    }
    return BenchReport(accuracy, counts, cost)


# --- cost model ---------------------------------------------------------------------

# Calibrated on per-sample input tokens measured for one model: a constant
# 963 tokens per billed image on top of 60 text tokens.
PER_IMAGE_TOKENS = 963
TEXT_TOKENS = 60


def billed_images(k: int, counting: str = "measured") -> int:
    """Images billed for a request with ``k`` variants (``k = 0``: plain image).

    ``"measured"`` reproduces the reference measurements, which behave as
    ``max(k, 1)`` images; ``"tuple"`` counts the full ``k + 1`` image tuple.
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if counting == "measured":
        return max(k, 1)
    if counting == "tuple":
        return k + 1
    raise ValueError(f"unknown counting mode {counting!r}")


def cost_model(k: int, per_image_tokens=PER_IMAGE_TOKENS, text_tokens=TEXT_TOKENS, counting="measured"):
    """Projected input tokens: ``text_tokens + images * per_image_tokens``."""
    return text_tokens + billed_images(k, counting) * per_image_tokens


def fit_cost_model(observations):
    """Exact least-squares line through ``(images, tokens)`` pairs.

    Returns ``(per_image_tokens, text_tokens)`` as :class:`fractions.Fraction`.
    """
    pts = [(Fraction(x), Fraction(y)) for x, y in observations]
    if len(pts) < 2:
        raise ValueError("need at least two observations")
    n = len(pts)
    mx = sum(x for x, _ in pts) / n
    my = sum(y for _, y in pts) / n
    sxx = sum((x - mx) ** 2 for x, _ in pts)
    if sxx == 0:
        raise ValueError("observations need at least two distinct image counts")
    slope = sum((x - mx) * (y - my) for x, y in pts) / sxx
    return slope, my - slope * mx
