import pytest
import requests
import yaml

from dialogkit.errors import (
    FixtureParseError,
    MissingFixture,
    ProviderHTTPError,
    ProviderTimeout,
)
from dialogkit.gateway import GenerationParams, prompt_hash
from dialogkit.providers import (
    HttpProvider,
    MockProvider,
    ProviderConfig,
    make_provider,
)

PARAMS = GenerationParams()


def _write_fixtures(path, items):
    path.write_text(yaml.safe_dump(items))
    return path


class TestMockProvider:
    def test_lookup(self, tmp_path):
        path = _write_fixtures(tmp_path / "f.yaml", [{
            "template_id": "t", "prompt_hash": prompt_hash("hello  world"),
            "response": "hi",
        }])
        provider = MockProvider(path)
        assert provider.complete("hello world", [], PARAMS, "t") == "hi"

    def test_strict_missing(self, tmp_path):
        provider = MockProvider(_write_fixtures(tmp_path / "f.yaml", []))
        with pytest.raises(MissingFixture):
            provider.complete("unknown", [], PARAMS, "t")

    def test_echo_mode(self, tmp_path):
        provider = MockProvider(_write_fixtures(tmp_path / "f.yaml", []),
                                mode="echo")
        out = provider.complete("unknown", [], PARAMS, "t")
        assert "no fixture" in out and "t" in out

    def test_bad_yaml(self, tmp_path):
        path = tmp_path / "f.yaml"
        path.write_text("{ broken: [")
        with pytest.raises(FixtureParseError):
            MockProvider(path)

    def test_missing_field(self, tmp_path):
        path = _write_fixtures(tmp_path / "f.yaml", [{"template_id": "t"}])
        with pytest.raises(FixtureParseError):
            MockProvider(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FixtureParseError):
            MockProvider(tmp_path / "nope.yaml")

    def test_not_a_list(self, tmp_path):
        path = tmp_path / "f.yaml"
        path.write_text("key: value")
        with pytest.raises(FixtureParseError):
            MockProvider(path)


class FakeResponse:
    def __init__(self, status_code, body=None, text=""):
        self.status_code = status_code
        self._body = body
        self.text = text

    def json(self):
        if self._body is None:
            raise ValueError("no body")
        return self._body


class FakeSession:
    """Queue of responses/exceptions; records every request."""

    def __init__(self, outcomes):
        self.outcomes = list(outcomes)
        self.requests = []

    def post(self, url, json=None, headers=None, timeout=None):
        self.requests.append({"url": url, "json": json, "headers": headers})
        outcome = self.outcomes.pop(0)
        if isinstance(outcome, Exception):
            raise outcome
        return outcome


def _http_provider(outcomes, sleeps=None, **kwargs):
    config = ProviderConfig(kind="http_openai_compatible",
                            endpoint="https://api.example.test/v1", **kwargs)
    session = FakeSession(outcomes)
    sleep_log = sleeps if sleeps is not None else []
    provider = HttpProvider(config, session=session,
                            sleep=sleep_log.append)
    return provider, session, sleep_log


def _ok(content="fine"):
    return FakeResponse(200, {"choices": [{"message": {"content": content}}]})


class TestHttpProvider:
    def test_success(self):
        provider, session, _ = _http_provider([_ok("answer")])
        out = provider.complete("prompt", [], PARAMS, "t")
        assert out == "answer"
        request = session.requests[0]
        assert request["url"].endswith("/chat/completions")
        assert request["json"]["temperature"] == 0.7
        assert request["json"]["max_tokens"] == 800
        assert request["json"]["messages"][-1] == {
            "role": "user", "content": "prompt"}

    def test_credential_from_env(self, monkeypatch):
        monkeypatch.setenv("LLM_API_KEY", "sekret")
        provider, session, _ = _http_provider([_ok()])
        provider.complete("p", [], PARAMS, "t")
        assert session.requests[0]["headers"]["Authorization"] == "Bearer sekret"

    def test_no_credential_no_header(self, monkeypatch):
        monkeypatch.delenv("LLM_API_KEY", raising=False)
        provider, session, _ = _http_provider([_ok()])
        provider.complete("p", [], PARAMS, "t")
        assert "Authorization" not in session.requests[0]["headers"]

    def test_custom_credential_env(self, monkeypatch):
        monkeypatch.setenv("OTHER_KEY", "k2")
        provider, session, _ = _http_provider([_ok()],
                                              credential_env="OTHER_KEY")
        provider.complete("p", [], PARAMS, "t")
        assert session.requests[0]["headers"]["Authorization"] == "Bearer k2"

    def test_retry_on_429_then_success(self):
        provider, session, sleeps = _http_provider(
            [FakeResponse(429), _ok("late")])
        assert provider.complete("p", [], PARAMS, "t") == "late"
        assert len(session.requests) == 2
        assert sleeps == [0.5]

    def test_retry_on_500_exponential_backoff(self):
        provider, session, sleeps = _http_provider(
            [FakeResponse(500), FakeResponse(502), FakeResponse(503),
             FakeResponse(504)])
        with pytest.raises(ProviderHTTPError):
            provider.complete("p", [], PARAMS, "t")
        assert len(session.requests) == 4  # initial + 3 retries
        assert sleeps == [0.5, 1.0, 2.0]

    def test_timeout_retried(self):
        provider, session, _ = _http_provider(
            [requests.Timeout("slow"), _ok("ok")])
        assert provider.complete("p", [], PARAMS, "t") == "ok"

    def test_timeout_exhausted(self):
        provider, _, _ = _http_provider([requests.Timeout("slow")] * 4)
        with pytest.raises(ProviderTimeout):
            provider.complete("p", [], PARAMS, "t")

    def test_4xx_not_retried(self):
        provider, session, _ = _http_provider([FakeResponse(401)])
        with pytest.raises(ProviderHTTPError) as excinfo:
            provider.complete("p", [], PARAMS, "t")
        assert excinfo.value.status == 401
        assert len(session.requests) == 1

    def test_malformed_body(self):
        provider, _, _ = _http_provider([FakeResponse(200, {"weird": True})])
        with pytest.raises(ProviderHTTPError):
            provider.complete("p", [], PARAMS, "t")

    def test_history_window_in_messages(self):
        provider, session, _ = _http_provider([_ok()])
        context = [{"role": "user", "content": str(i)} for i in range(20)]
        provider.complete("p", context, PARAMS, "t")
        messages = session.requests[0]["json"]["messages"]
        # 10 history turns + 1 user prompt
        assert len(messages) == 11

    def test_system_message_first(self):
        config = ProviderConfig(kind="http_openai_compatible",
                                endpoint="https://api.example.test/v1")
        session = FakeSession([_ok()])
        provider = HttpProvider(config, system_message="be polite",
                                session=session, sleep=lambda _: None)
        provider.complete("p", [], PARAMS, "t")
        assert session.requests[0]["json"]["messages"][0] == {
            "role": "system", "content": "be polite"}


class TestFactory:
    def test_mock(self, tmp_path):
        path = _write_fixtures(tmp_path / "f.yaml", [])
        provider = make_provider(ProviderConfig(kind="mock",
                                                fixtures_path=str(path)))
        assert isinstance(provider, MockProvider)

    def test_http(self):
        provider = make_provider(ProviderConfig(
            kind="http_openai_compatible", endpoint="https://x.test"))
        assert isinstance(provider, HttpProvider)

    def test_unknown(self):
        with pytest.raises(ValueError):
            make_provider(ProviderConfig(kind="grpc"))
