from __future__ import annotations

import logging

import pytest

from fcner.gateway import (
    ChatExchange,
    ChatParams,
    ChatRequest,
    FixtureStore,
    GatewayConfig,
    GatewayMode,
    LlmGateway,
    MissingFixtureError,
    Purpose,
    TransportError,
    request_key,
)


def live_gateway(server, tmp_path=None, mode=GatewayMode.LIVE, retries=2):
    return LlmGateway(
        GatewayConfig(
            mode=mode,
            base_url=server.base_url,
            fixture_dir=tmp_path,
            timeout_s=5.0,
            retries=retries,
            backoff_s=0.01,
        )
    )


class TestRequestKey:
    def test_stable(self):
        r = ChatRequest("m", "prompt text", ChatParams())
        assert request_key(r) == request_key(r)

    def test_line_endings_normalized(self):
        a = ChatRequest("m", "line one\nline two", ChatParams())
        b = ChatRequest("m", "line one\r\nline two", ChatParams())
        assert request_key(a) == request_key(b)

    def test_params_distinguish(self):
        a = ChatRequest("m", "p", ChatParams(temperature=0.0))
        b = ChatRequest("m", "p", ChatParams(temperature=0.7))
        assert request_key(a) != request_key(b)

    def test_purpose_excluded(self):
        a = ChatRequest("m", "p", ChatParams(), Purpose.EXTRACTION)
        b = ChatRequest("m", "p", ChatParams(), Purpose.MATCHING)
        assert request_key(a) == request_key(b)


class TestLive:
    def test_simple_generate(self, scripted_server):
        scripted_server.script = [(200, {"response": "hello there"})]
        gateway = live_gateway(scripted_server)
        exchange = gateway.chat(ChatRequest("gemma2:9b", "hi", ChatParams()))
        assert exchange.response_text == "hello there"
        assert exchange.mode == "live"
        assert exchange.latency_s >= 0
        assert scripted_server.requests[0]["model"] == "gemma2:9b"
        assert scripted_server.requests[0]["options"]["temperature"] == 0.0

    def test_two_500s_then_success(self, scripted_server, caplog):
        scripted_server.script = [
            (500, {"error": "boom"}),
            (500, {"error": "boom"}),
            (200, {"response": "recovered"}),
        ]
        gateway = live_gateway(scripted_server, retries=2)
        with caplog.at_level(logging.WARNING):
            exchange = gateway.chat(ChatRequest("gemma2:9b", "hi", ChatParams()))
        assert exchange.response_text == "recovered"
        assert len(scripted_server.requests) == 3
        assert "2 retries" in caplog.text

    def test_exhausted_retries_raise(self, scripted_server):
        scripted_server.script = [(500, {"error": "boom"})]
        gateway = live_gateway(scripted_server, retries=1)
        with pytest.raises(TransportError):
            gateway.chat(ChatRequest("gemma2:9b", "hi", ChatParams()))
        assert len(scripted_server.requests) == 2

    def test_health_check(self, scripted_server):
        gateway = live_gateway(scripted_server)
        assert gateway.health_check("gemma2:9b") is True
        assert gateway.health_check("nope:0b") is False

    def test_health_check_transport_failure_is_false(self):
        gateway = LlmGateway(
            GatewayConfig(mode=GatewayMode.LIVE, base_url="http://127.0.0.1:1", timeout_s=0.2)
        )
        assert gateway.health_check("gemma2:9b") is False

    def test_env_var_overrides_endpoint(self, scripted_server, monkeypatch):
        monkeypatch.setenv("FCNER_ENDPOINT", scripted_server.base_url)
        gateway = LlmGateway(GatewayConfig(mode=GatewayMode.LIVE, base_url="http://example.invalid"))
        assert gateway.health_check("qwen2:7b") is True


class TestRecordReplay:
    def test_record_then_replay_byte_identical(self, scripted_server, tmp_path):
        scripted_server.script = [(200, {"response": "recorded é answer"})]
        recorder = live_gateway(scripted_server, tmp_path, mode=GatewayMode.RECORD)
        request = ChatRequest("gemma2:9b", "the prompt", ChatParams())
        live = recorder.chat(request)

        replayer = LlmGateway(GatewayConfig(mode=GatewayMode.REPLAY, fixture_dir=tmp_path))
        replayed = replayer.chat(request)
        assert replayed.response_text == live.response_text
        assert replayed.mode == "replayed"
        assert replayed.latency_s == live.latency_s  # timing comes from the recording

    def test_replay_missing_fixture_names_key(self, tmp_path):
        gateway = LlmGateway(GatewayConfig(mode=GatewayMode.REPLAY, fixture_dir=tmp_path))
        request = ChatRequest("gemma2:9b", "never recorded", ChatParams())
        with pytest.raises(MissingFixtureError) as err:
            gateway.chat(request)
        assert err.value.key == request_key(request)

    def test_replay_health_check_always_true(self, tmp_path):
        gateway = LlmGateway(GatewayConfig(mode=GatewayMode.REPLAY, fixture_dir=tmp_path))
        assert gateway.health_check("anything:at-all") is True

    def test_replay_mode_requires_fixture_dir(self):
        with pytest.raises(ValueError):
            LlmGateway(GatewayConfig(mode=GatewayMode.REPLAY, fixture_dir=None))

    def test_store_round_trip(self, tmp_path):
        store = FixtureStore(tmp_path)
        request = ChatRequest("m", "p“q", ChatParams(seed=7), Purpose.STRUCTURING)
        exchange = ChatExchange(request, "resp", 1.25, "live")
        path = store.put(exchange)
        assert path.name == f"{request_key(request)}.json"
        loaded = store.get(request_key(request))
        assert loaded.response_text == "resp"
        assert loaded.latency_s == 1.25
        assert loaded.request.params.seed == 7
        assert loaded.mode == "replayed"

    def test_listener_sees_every_exchange(self, tmp_path):
        store = FixtureStore(tmp_path)
        request = ChatRequest("m", "p", ChatParams())
        store.put(ChatExchange(request, "r", 0.5, "live"))
        gateway = LlmGateway(GatewayConfig(mode=GatewayMode.REPLAY, fixture_dir=tmp_path))
        seen = []
        gateway.add_listener(seen.append)
        gateway.chat(request)
        gateway.remove_listener(seen.append)
        gateway.chat(request)
        assert len(seen) == 1 and seen[0].latency_s == 0.5


def test_chat_params_validation():
    with pytest.raises(ValueError):
        ChatParams(temperature=-0.1)
    with pytest.raises(ValueError):
        ChatRequest("", "p", ChatParams())
