"""Client for OpenAI-compatible multimodal chat-completions endpoints."""
from __future__ import annotations

import base64
import collections
import io
import json
import logging
import os
import threading
import time
from dataclasses import dataclass, field

import httpx
from PIL import Image

from .errors import AuthFailed, ConfigError, ProtocolError, RateLimited, Timeout
from .imaging import as_raster

log = logging.getLogger(__name__)

RETRYABLE = frozenset({429, 500, 502, 503, 504})


@dataclass
class EndpointConfig:
    base_url: str
    model_name: str
    api_key_env: str = "OPENAI_API_KEY"
    timeout_s: float = 60.0
    max_retries: int = 3
    max_concurrent_requests: int = 4
    requests_per_minute: int = 60
    backoff_base_s: float = 1.0
    backoff_max_s: float = 30.0
    temperature: float = 0.0
    max_tokens: int = 256

    def __post_init__(self):
        if self.timeout_s <= 0:
            raise ConfigError(f"timeout_s must be > 0, got {self.timeout_s}")
        if self.max_concurrent_requests < 1:
            raise ConfigError("max_concurrent_requests must be >= 1")
        if self.requests_per_minute < 1:
            raise ConfigError("requests_per_minute must be >= 1")
        if self.max_retries < 0:
            raise ConfigError("max_retries must be >= 0")

    @property
    def api_key(self) -> str | None:
        return os.environ.get(self.api_key_env) if self.api_key_env else None

    @classmethod
    def from_dict(cls, d) -> "EndpointConfig":
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(f"bad endpoint config: {exc}") from exc


@dataclass
class VisionRequest:
    prompt: str
    images: list = field(default_factory=list)
    temperature: float | None = None
    max_tokens: int | None = None


@dataclass
class VisionResponse:
    text: str
    input_tokens: int | None
    output_tokens: int | None
    latency_s: float
    raw_status: int
    retry_count: int = 0


def encode_png(img) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(as_raster(img)).save(buf, format="PNG", optimize=False)
    return buf.getvalue()


def build_body(req: VisionRequest, cfg: EndpointConfig) -> bytes:
    """Serialised request body; identical inputs give identical bytes."""
    if not req.prompt:
        raise ValueError("prompt must be non-empty")
    content = [{"type": "text", "text": req.prompt}]
    for img in req.images:
        url = "data:image/png;base64," + base64.b64encode(encode_png(img)).decode("ascii")
        content.append({"type": "image_url", "image_url": {"url": url}})
    body = {
        "model": cfg.model_name,
        "messages": [{"role": "user", "content": content}],
        "temperature": cfg.temperature if req.temperature is None else req.temperature,
        "max_tokens": cfg.max_tokens if req.max_tokens is None else req.max_tokens,
    }
    return json.dumps(body, ensure_ascii=False, separators=(",", ":")).encode("utf-8")


class SlidingWindowLimiter:
    """Blocks so that at most ``limit`` acquisitions fall in any ``window`` seconds."""

    def __init__(self, limit: int, window: float = 60.0, clock=time.monotonic, sleep=time.sleep):
        self.limit, self.window = limit, window
        self._clock, self._sleep = clock, sleep
        self._stamps = collections.deque()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = self._clock()
                while self._stamps and self._stamps[0] <= now - self.window:
                    self._stamps.popleft()
                if len(self._stamps) < self.limit:
                    self._stamps.append(now)
                    return
                wait = self._stamps[0] + self.window - now
            self._sleep(max(wait, 1e-3))


class ChatClient:
    """Thread-safe client bound to one endpoint.

    Concurrency is capped by a semaphore and the request rate by a
    sliding-window limiter; both are shared by all threads using the client.
    Pass ``transport`` (e.g. :class:`MockEndpoint`) to run offline.
    """

    def __init__(self, cfg: EndpointConfig, transport=None, sleep=time.sleep, clock=time.monotonic):
        self.cfg = cfg
        self._sleep = sleep
        self._clock = clock
        self._http = httpx.Client(timeout=cfg.timeout_s, transport=transport)
        self._slots = threading.BoundedSemaphore(cfg.max_concurrent_requests)
        self.limiter = SlidingWindowLimiter(cfg.requests_per_minute, clock=clock, sleep=sleep)
        self._count_lock = threading.Lock()
        self.in_flight = 0
        self.max_in_flight = 0
        self.requests_issued = 0

    def close(self):
        self._http.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    @property
    def url(self) -> str:
        return self.cfg.base_url.rstrip("/") + "/chat/completions"

    def _headers(self):
        h = {"Content-Type": "application/json"}
        key = self.cfg.api_key
        if key:
            h["Authorization"] = f"Bearer {key}"
        return h

    def _post(self, body: bytes) -> httpx.Response:
        self.limiter.acquire()
        with self._slots:
            with self._count_lock:
                self.in_flight += 1
                self.requests_issued += 1
                self.max_in_flight = max(self.max_in_flight, self.in_flight)
            try:
                return self._http.post(self.url, content=body, headers=self._headers())
            finally:
                with self._count_lock:
                    self.in_flight -= 1

    def _backoff(self, attempt: int, resp: httpx.Response | None) -> float:
        delay = min(self.cfg.backoff_max_s, self.cfg.backoff_base_s * 2 ** attempt)
        if resp is not None:
            try:
                delay = max(delay, float(resp.headers.get("retry-after", 0)))
            except ValueError:
                pass
        return delay

    def send(self, req: VisionRequest) -> VisionResponse:
        """Issue one chat request, retrying 429/5xx and timeouts with backoff.

        ``latency_s`` is the wall time of the successful attempt.
        """
        body = build_body(req, self.cfg)
        last_status, last_exc, prev = None, None, None
        for attempt in range(self.cfg.max_retries + 1):
            if attempt:
                self._sleep(self._backoff(attempt - 1, prev))
            prev = None
            t0 = self._clock()
            try:
                resp = self._post(body)
            except httpx.TimeoutException as exc:
                last_status, last_exc = None, exc
                log.warning("timeout on attempt %d: %s", attempt + 1, exc)
                continue
            except httpx.TransportError as exc:
                last_status, last_exc = None, exc
                log.warning("transport error on attempt %d: %s", attempt + 1, exc)
                continue
            latency = max(0.0, self._clock() - t0)
            status = resp.status_code
            if status in (401, 403):
                raise AuthFailed(f"HTTP {status} from {self.url}: {resp.text[:200]}")
            if status in RETRYABLE:
                last_status, last_exc, prev = status, None, resp
                log.warning("HTTP %d on attempt %d", status, attempt + 1)
                continue
            if status >= 400:
                raise ProtocolError(f"HTTP {status} from {self.url}: {resp.text[:200]}")
            return _parse(resp, latency, attempt)
        if last_status == 429:
            raise RateLimited(f"still rate limited after {self.cfg.max_retries} retries")
        if isinstance(last_exc, httpx.TimeoutException):
            raise Timeout(f"request timed out after {self.cfg.max_retries} retries") from last_exc
        if last_exc is not None:
            raise ProtocolError(f"transport failure: {last_exc}") from last_exc
        raise ProtocolError(f"HTTP {last_status} persisted after {self.cfg.max_retries} retries")

    def __call__(self, prompt: str) -> str:
        """Text-only completion; lets the client act as a judge."""
        return self.send(VisionRequest(prompt=prompt)).text


def _parse(resp: httpx.Response, latency: float, retries: int) -> VisionResponse:
    try:
        data = resp.json()
        text = data["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise ProtocolError(f"unexpected response body: {resp.text[:200]}") from exc
    if isinstance(text, list):  # some gateways return content parts
        text = "".join(p.get("text", "") for p in text if isinstance(p, dict))
    usage = data.get("usage") or {}
    return VisionResponse(
        text=text or "",
        input_tokens=usage.get("prompt_tokens"),
        output_tokens=usage.get("completion_tokens"),
        latency_s=latency,
        raw_status=resp.status_code,
        retry_count=retries,
    )


def send(req: VisionRequest, cfg: EndpointConfig, client: ChatClient | None = None) -> VisionResponse:
    if client is not None:
        return client.send(req)
    with ChatClient(cfg) as c:
        return c.send(req)


# --- offline endpoint ------------------------------------------------------------

def count_images(body: dict) -> int:
    parts = body["messages"][-1]["content"]
    return sum(1 for p in parts if isinstance(p, dict) and p.get("type") == "image_url")


def prompt_text(body: dict) -> str:
    parts = body["messages"][-1]["content"]
    if isinstance(parts, str):
        return parts
    return "".join(p.get("text", "") for p in parts if p.get("type") == "text")


def echo_image_count(body: dict) -> str:
    return f"images={count_images(body)}"


class MockEndpoint(httpx.MockTransport):
    """Deterministic in-process chat endpoint.

    ``responder(body) -> str`` produces the reply text. ``statuses`` is a
    script of HTTP statuses to return before falling back to 200.
    Token usage is reported as ``input_tokens_per_image * images + 60``.
    """

    def __init__(self, responder=echo_image_count, statuses=(), per_image_tokens=963, text_tokens=60):
        self.responder = responder
        self.script = list(statuses)
        self.per_image_tokens, self.text_tokens = per_image_tokens, text_tokens
        self.bodies = []
        self._lock = threading.Lock()
        super().__init__(self._handle)

    def _handle(self, request: httpx.Request) -> httpx.Response:
        body = json.loads(request.content)
        with self._lock:
            self.bodies.append(body)
            status = self.script.pop(0) if self.script else 200
        if status != 200:
            return httpx.Response(status, json={"error": {"message": f"scripted {status}"}})
        text = self.responder(body)
        n = count_images(body)
        return httpx.Response(200, json={
            "choices": [{"index": 0, "message": {"role": "assistant", "content": text}}],
            "usage": {"prompt_tokens": self.text_tokens + n * self.per_image_tokens,
                      "completion_tokens": max(1, len(text.split()))},
        })

    @property
    def request_count(self) -> int:
        return len(self.bodies)
