"""LLM providers: a deterministic fixture-backed mock (the default for tests
and offline runs) and an OpenAI-compatible HTTP client."""

from __future__ import annotations

import os
import time
from dataclasses import dataclass
from pathlib import Path

import requests
import yaml

from .errors import (
    FixtureParseError,
    MissingFixture,
    ProviderHTTPError,
    ProviderTimeout,
)
from .gateway import GenerationParams, prompt_hash

RETRYABLE_STATUSES = {429, 500, 502, 503, 504}


@dataclass
class ProviderConfig:
    kind: str = "mock"  # http_openai_compatible | mock
    endpoint: str = ""
    model: str = "gpt-4"
    credential_env: str = "LLM_API_KEY"
    timeout: float = 30.0
    max_retries: int = 3
    fixtures_path: str = ""
    mock_mode: str = "strict"  # strict | echo


class MockProvider:
    """Pure function of (fixtures, template id, rendered prompt).

    strict mode errors on an unknown prompt; echo mode returns a marker so
    exploratory runs keep going.
    """

    provider_id = "mock"

    def __init__(self, fixtures_path: str | Path, mode: str = "strict"):
        self.mode = mode
        self.fixtures_path = Path(fixtures_path)
        self._responses: dict[tuple[str, str], str] = {}
        try:
            with open(self.fixtures_path, encoding="utf-8") as fh:
                doc = yaml.safe_load(fh) or []
        except yaml.YAMLError as exc:
            raise FixtureParseError(f"{fixtures_path}: {exc}") from exc
        except OSError as exc:
            raise FixtureParseError(f"cannot read {fixtures_path}: {exc}") from exc
        if not isinstance(doc, list):
            raise FixtureParseError(f"{fixtures_path}: expected a list of fixtures")
        for index, item in enumerate(doc):
            try:
                key = (item["template_id"], item["prompt_hash"])
                self._responses[key] = item["response"]
            except (TypeError, KeyError) as exc:
                raise FixtureParseError(
                    f"{fixtures_path}: fixture #{index} missing field {exc}"
                ) from exc

    def complete(self, prompt: str, context, params: GenerationParams,
                 template_id: str) -> str:
        key = (template_id, prompt_hash(prompt))
        if key in self._responses:
            return self._responses[key]
        if self.mode == "echo":
            return f"[no fixture for {template_id}/{key[1]}]"
        raise MissingFixture(
            f"no fixture for template '{template_id}' with hash {key[1]}"
        )


class HttpProvider:
    """OpenAI-compatible chat-completions client with bounded retries.

    Retries only timeouts and HTTP 429/5xx with exponential backoff; other
    4xx responses fail immediately. Credentials come from the environment,
    never from project files.
    """

    provider_id = "http"

    def __init__(self, config: ProviderConfig, system_message: str = "",
                 session: requests.Session | None = None, sleep=time.sleep):
        self.config = config
        self.system_message = system_message
        self.session = session or requests.Session()
        self._sleep = sleep

    def _messages(self, prompt: str, context, params: GenerationParams):
        messages = []
        if self.system_message:
            messages.append({"role": "system", "content": self.system_message})
        messages.extend((context or [])[-params.history_window:])
        messages.append({"role": "user", "content": prompt})
        return messages

    def complete(self, prompt: str, context, params: GenerationParams,
                 template_id: str) -> str:
        api_key = os.environ.get(self.config.credential_env, "")
        url = self.config.endpoint.rstrip("/") + "/chat/completions"
        payload = {
            "model": self.config.model,
            "messages": self._messages(prompt, context, params),
            "temperature": params.temperature,
            "top_p": params.top_p,
            "max_tokens": params.max_response_tokens,
            "frequency_penalty": params.frequency_penalty,
            "presence_penalty": params.presence_penalty,
        }
        headers = {"Content-Type": "application/json"}
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"

        last_error: Exception | None = None
        for attempt in range(self.config.max_retries + 1):
            if attempt:
                self._sleep(0.5 * 2 ** (attempt - 1))
            try:
                response = self.session.post(
                    url, json=payload, headers=headers, timeout=self.config.timeout
                )
            except requests.Timeout as exc:
                last_error = ProviderTimeout(str(exc))
                continue
            except requests.RequestException as exc:
                raise ProviderHTTPError(0, str(exc)) from exc
            if response.status_code in RETRYABLE_STATUSES:
                last_error = ProviderHTTPError(response.status_code, response.text[:200])
                continue
            if response.status_code >= 400:
                raise ProviderHTTPError(response.status_code, response.text[:200])
            try:
                return response.json()["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError) as exc:
                raise ProviderHTTPError(
                    response.status_code, f"malformed response body: {exc}"
                ) from exc
        assert last_error is not None
        raise last_error


def make_provider(config: ProviderConfig, system_message: str = ""):
    if config.kind == "mock":
        return MockProvider(config.fixtures_path, mode=config.mock_mode)
    if config.kind == "http_openai_compatible":
        return HttpProvider(config, system_message=system_message)
    raise ValueError(f"unknown provider kind '{config.kind}'")
