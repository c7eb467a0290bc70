from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from fcner.corpus import Article
from fcner.gateway import (
    ChatExchange,
    ChatParams,
    ChatRequest,
    FixtureStore,
    GatewayConfig,
    GatewayMode,
    LlmGateway,
    Purpose,
)


def make_article(article_id="a1", body="Plain test body mentioning Ada Obi and Helix Group."):
    return Article(id=article_id, body=body)


def record_fixture(store: FixtureStore, model: str, prompt: str, response: str,
                   latency: float = 0.5, purpose: Purpose = Purpose.EXTRACTION) -> None:
    request = ChatRequest(model, prompt, ChatParams(), purpose)
    store.put(ChatExchange(request=request, response_text=response, latency_s=latency, mode="live"))


@pytest.fixture
def replay_gateway(tmp_path):
    """A replay-mode gateway plus its backing store, for scripting flows
    without a network."""
    fixture_dir = tmp_path / "fixtures"
    gateway = LlmGateway(GatewayConfig(mode=GatewayMode.REPLAY, fixture_dir=fixture_dir))
    return gateway, FixtureStore(fixture_dir)


class _ScriptedOllamaHandler(BaseHTTPRequestHandler):
    server_version = "scripted"

    def log_message(self, *args):
        pass

    def do_GET(self):
        if self.path == "/api/tags":
            self._send(200, {"models": [{"name": n} for n in self.server.models]})
        else:
            self._send(404, {"error": "not found"})

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        payload = json.loads(self.rfile.read(length)) if length else {}
        self.server.requests.append(payload)
        script = self.server.script
        status, body = script[min(len(self.server.requests) - 1, len(script) - 1)]
        self._send(status, body)

    def _send(self, status, doc):
        data = json.dumps(doc).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)


@pytest.fixture
def scripted_server():
    """Local HTTP server speaking just enough of the model-server protocol:
    set .script to a list of (status, json_body) consumed per POST."""
    server = HTTPServer(("127.0.0.1", 0), _ScriptedOllamaHandler)
    server.script = [(200, {"response": "ok"})]
    server.models = ["gemma2:9b", "qwen2:7b"]
    server.requests = []
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    server.base_url = f"http://127.0.0.1:{server.server_address[1]}"
    yield server
    server.shutdown()
    thread.join(timeout=2)
