"""Chat access to local model servers with record/replay fixtures.

Live and record modes talk to an Ollama-compatible HTTP endpoint
(``POST {base}/api/generate``, ``GET {base}/api/tags``); replay mode serves
previously recorded exchanges from a fixture directory and never touches
the network. Fixtures are one JSON file per exchange, named by a canonical
hash of (model, prompt, sampling params), so a replayed run is byte-stable.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable

import requests

log = logging.getLogger(__name__)

DEFAULT_ENDPOINT = "http://localhost:11434"
ENDPOINT_ENV_VAR = "FCNER_ENDPOINT"


class TransportError(RuntimeError):
    """Endpoint unreachable or persistently failing after retries."""


class MissingFixtureError(LookupError):
    """Strict replay was asked for an exchange that was never recorded."""

    def __init__(self, key: str):
        super().__init__(f"no recorded exchange for request key {key}")
        self.key = key


class GatewayMode(Enum):
    LIVE = "live"
    RECORD = "record"
    REPLAY = "replay"


class Purpose(Enum):
    EXTRACTION = "extraction"
    STRUCTURING = "structuring"
    MATCHING = "matching"
    VERIFICATION = "verification"


@dataclass(frozen=True)
class ChatParams:
    temperature: float = 0.0
    seed: int | None = 42
    max_tokens: int | None = None

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


@dataclass(frozen=True)
class ChatRequest:
    model_id: str
    prompt: str
    params: ChatParams = field(default_factory=ChatParams)
    purpose: Purpose = Purpose.EXTRACTION

    def __post_init__(self) -> None:
        if not self.model_id:
            raise ValueError("model_id must be non-empty")


@dataclass(frozen=True)
class ChatExchange:
    request: ChatRequest
    response_text: str
    latency_s: float
    mode: str  # "live" | "replayed"


def request_key(request: ChatRequest) -> str:
    """Canonical content hash identifying a chat call.

    Line endings in the prompt are normalized so a fixture recorded on one
    platform replays on another; the purpose tag is metadata and excluded.
    """
    canonical = {
        "model": request.model_id,
        "prompt": request.prompt.replace("\r\n", "\n").replace("\r", "\n"),
        "params": {
            "temperature": request.params.temperature,
            "seed": request.params.seed,
            "max_tokens": request.params.max_tokens,
        },
    }
    blob = json.dumps(canonical, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class FixtureStore:
    """One JSON file per exchange, content-addressed by the request key.
    Writes are serialized and atomic."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self._write_lock = threading.Lock()

    def path_for(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def get(self, key: str) -> ChatExchange | None:
        path = self.path_for(key)
        if not path.is_file():
            return None
        doc = json.loads(path.read_text(encoding="utf-8"))
        req = doc["request"]
        request = ChatRequest(
            model_id=req["model_id"],
            prompt=req["prompt"],
            params=ChatParams(
                temperature=req["params"]["temperature"],
                seed=req["params"]["seed"],
                max_tokens=req["params"]["max_tokens"],
            ),
            purpose=Purpose(req.get("purpose", "extraction")),
        )
        return ChatExchange(
            request=request,
            response_text=doc["response_text"],
            latency_s=float(doc["latency_s"]),
            mode="replayed",
        )

    def put(self, exchange: ChatExchange) -> Path:
        key = request_key(exchange.request)
        doc = {
            "key": key,
            "request": {
                "model_id": exchange.request.model_id,
                "prompt": exchange.request.prompt,
                "params": {
                    "temperature": exchange.request.params.temperature,
                    "seed": exchange.request.params.seed,
                    "max_tokens": exchange.request.params.max_tokens,
                },
                "purpose": exchange.request.purpose.value,
            },
            "response_text": exchange.response_text,
            "latency_s": exchange.latency_s,
        }
        with self._write_lock:
            self.directory.mkdir(parents=True, exist_ok=True)
            path = self.path_for(key)
            tmp = path.with_suffix(".tmp")
            tmp.write_text(json.dumps(doc, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
            os.replace(tmp, path)
        return path


@dataclass(frozen=True)
class GatewayConfig:
    mode: GatewayMode = GatewayMode.REPLAY
    base_url: str = DEFAULT_ENDPOINT
    fixture_dir: str | Path | None = None
    timeout_s: float = 120.0
    retries: int = 2
    backoff_s: float = 0.5
    max_inflight: int = 1

    @property
    def endpoint(self) -> str:
        return (os.environ.get(ENDPOINT_ENV_VAR) or self.base_url).rstrip("/")


ExchangeListener = Callable[[ChatExchange], None]


class LlmGateway:
    """Uniform chat access in live, record, or replay mode."""

    def __init__(self, config: GatewayConfig, session: requests.Session | None = None):
        self.config = config
        self.store = FixtureStore(config.fixture_dir) if config.fixture_dir else None
        if config.mode in (GatewayMode.RECORD, GatewayMode.REPLAY) and self.store is None:
            raise ValueError(f"{config.mode.value} mode needs a fixture_dir")
        self._session = session or requests.Session()
        self._inflight = threading.Semaphore(max(1, config.max_inflight))
        self._listeners: list[ExchangeListener] = []

    def add_listener(self, listener: ExchangeListener) -> None:
        """Observe every completed exchange (used for call counts/latency)."""
        self._listeners.append(listener)

    def remove_listener(self, listener: ExchangeListener) -> None:
        self._listeners.remove(listener)

    def _notify(self, exchange: ChatExchange) -> ChatExchange:
        for listener in self._listeners:
            listener(exchange)
        return exchange

    def chat(self, request: ChatRequest) -> ChatExchange:
        if self.config.mode is GatewayMode.REPLAY:
            key = request_key(request)
            exchange = self.store.get(key)
            if exchange is None:
                raise MissingFixtureError(key)
            # Keep the caller's request (purpose tag may differ from the
            # recording); response and latency come from the fixture.
            return self._notify(
                ChatExchange(
                    request=request,
                    response_text=exchange.response_text,
                    latency_s=exchange.latency_s,
                    mode="replayed",
                )
            )

        with self._inflight:
            response_text, latency = self._generate_with_retries(request)
        exchange = ChatExchange(request=request, response_text=response_text, latency_s=latency, mode="live")
        if self.config.mode is GatewayMode.RECORD:
            self.store.put(exchange)
        return self._notify(exchange)

    def _generate_with_retries(self, request: ChatRequest) -> tuple[str, float]:
        url = f"{self.config.endpoint}/api/generate"
        options: dict = {"temperature": request.params.temperature}
        if request.params.seed is not None:
            options["seed"] = request.params.seed
        if request.params.max_tokens is not None:
            options["num_predict"] = request.params.max_tokens
        payload = {"model": request.model_id, "prompt": request.prompt, "stream": False, "options": options}

        start = time.perf_counter()
        last_error: Exception | None = None
        for attempt in range(self.config.retries + 1):
            if attempt:
                time.sleep(self.config.backoff_s * 2 ** (attempt - 1))
            try:
                resp = self._session.post(url, json=payload, timeout=self.config.timeout_s)
                if resp.status_code >= 500:
                    last_error = TransportError(f"{url} returned HTTP {resp.status_code}")
                    continue
                resp.raise_for_status()
                body = resp.json()
                if attempt:
                    log.warning("chat to %s succeeded after %d retries", request.model_id, attempt)
                return str(body.get("response", "")), time.perf_counter() - start
            except requests.RequestException as e:
                last_error = e
        raise TransportError(
            f"chat to {request.model_id} failed after {self.config.retries} retries: {last_error}"
        ) from last_error

    def health_check(self, model_id: str) -> bool:
        """True iff the endpoint lists the model. Always true in replay mode."""
        if self.config.mode is GatewayMode.REPLAY:
            return True
        try:
            resp = self._session.get(f"{self.config.endpoint}/api/tags", timeout=self.config.timeout_s)
            resp.raise_for_status()
            models = resp.json().get("models", [])
        except (requests.RequestException, ValueError) as e:
            log.warning("health check for %s failed: %s", model_id, e)
            return False
        for entry in models:
            name = entry.get("name", "")
            if name == model_id or name.split(":")[0] == model_id:
                return True
        return False
