"""Single chokepoint for every LLM call.

Holds the prompt-template registry, generation parameter defaults, the
append-only audit log, and response-format parsing helpers. Providers live in
providers.py; tests run against the deterministic mock.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import EmptyList, MissingBinding, ProviderError, TemplateUnknown
from .nlg import substitute
from .project import extract_placeholders


@dataclass
class GenerationParams:
    temperature: float = 0.7
    top_p: float = 0.95
    max_response_tokens: int = 800
    frequency_penalty: float = 0.0
    presence_penalty: float = 0.0
    history_window: int = 10

    def to_dict(self) -> dict[str, Any]:
        return {
            "temperature": self.temperature,
            "top_p": self.top_p,
            "max_response_tokens": self.max_response_tokens,
            "frequency_penalty": self.frequency_penalty,
            "presence_penalty": self.presence_penalty,
            "history_window": self.history_window,
        }


@dataclass
class PromptTemplate:
    id: str
    body: str
    expects: str = "free_text"  # free_text | numbered_list | labeled_summary | verbatim_choice
    params_override: GenerationParams | None = None


def normalize_prompt(text: str) -> str:
    """Whitespace-insensitive form used for fixture hashing, so cosmetic
    template edits do not invalidate recorded fixtures."""
    return re.sub(r"\s+", " ", text).strip()


def prompt_hash(rendered: str) -> str:
    return hashlib.sha256(normalize_prompt(rendered).encode("utf-8")).hexdigest()[:16]


@dataclass
class LLMExchange:
    exchange_id: str
    template_id: str
    prompt: str
    context: list[dict[str, str]]
    params: dict[str, Any]
    provider_id: str
    response: str | None
    error: str | None
    latency: float
    timestamp: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "exchange_id": self.exchange_id,
            "template_id": self.template_id,
            "prompt": self.prompt,
            "context": self.context,
            "params": self.params,
            "provider_id": self.provider_id,
            "response": self.response,
            "error": self.error,
            "latency": self.latency,
            "timestamp": self.timestamp,
        }


class AuditLog:
    """Append-only JSON Lines log of every provider exchange."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path else None
        self.entries: list[LLMExchange] = []
        self._lock = threading.Lock()

    def append(self, exchange: LLMExchange) -> None:
        with self._lock:
            self.entries.append(exchange)
            if self.path is not None:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(exchange.to_dict(), ensure_ascii=False) + "\n")


class PromptRegistry:
    def __init__(self):
        self._templates: dict[str, PromptTemplate] = {}

    def register(self, template: PromptTemplate, replace: bool = False) -> None:
        if template.id in self._templates and not replace:
            raise ValueError(f"prompt template '{template.id}' already registered")
        self._templates[template.id] = template

    def get(self, template_id: str) -> PromptTemplate:
        if template_id not in self._templates:
            raise TemplateUnknown(template_id)
        return self._templates[template_id]

    def ids(self) -> list[str]:
        return sorted(self._templates)


def default_registry() -> PromptRegistry:
    """Built-in prompt bodies; projects may re-register to tune them."""
    registry = PromptRegistry()
    for template in [
        PromptTemplate(
            id="autocorrect",
            body=(
                "Please rephrase the following utterance into orthographically "
                "and grammatically correct American English. Reply with only "
                "the corrected utterance.\n\n{utterance}"
            ),
        ),
        PromptTemplate(
            id="out_of_scope",
            body=(
                "You are a client advisor chatbot for a private bank. The user "
                "asked a question outside the bank's services. Answer briefly "
                "if it is a general-knowledge question. If it asks for "
                "financial advice, reply with exactly: FINANCIAL_ADVICE_REFUSED\n\n"
                "Question: {question}"
            ),
        ),
        PromptTemplate(
            id="disambiguation",
            body=(
                "A banking chatbot could not tell what the user wants. The user "
                "said: \"{utterance}\". It may mean \"{option_a}\" or "
                "\"{option_b}\". Write one short clarification question that "
                "offers the user both readings by name."
            ),
        ),
        PromptTemplate(
            id="rephrase",
            body=(
                "Rephrase the following chatbot statement {directive}. Keep the "
                "same meaning and keep every number, name, and address "
                "unchanged.\n\n{text}"
            ),
        ),
        PromptTemplate(
            id="closed_qa",
            body=(
                "For each question literally answer one of the below answers in "
                "exactly that wording, if those answers are suitable. If none "
                "of the below answers are a suitable answer to the question "
                "answer: “{default_answer}”.\n\n{answers}\n\n"
                "User: {question}"
            ),
            expects="verbatim_choice",
        ),
        PromptTemplate(
            id="summarize",
            body=(
                "Summarise the following conversation between a chatbot and a "
                "person, and state what the agent picking up the conversation "
                "needs to do.\n---\n{transcript}\n---\n"
                "Use this format:\nAgent Action Required:\nSummary:"
            ),
            expects="labeled_summary",
        ),
        PromptTemplate(
            id="summarize_retry",
            body=(
                "Summarise the following conversation between a chatbot and a "
                "person, and state what the agent picking up the conversation "
                "needs to do.\n---\n{transcript}\n---\n"
                "You MUST reply in exactly this format, both labels on their "
                "own lines:\nAgent Action Required: <what the human agent must do>\n"
                "Summary: <what happened in the conversation>"
            ),
            expects="labeled_summary",
        ),
        PromptTemplate(
            id="gen_intents",
            body=(
                "For designing a chatbot, give me a list of {n} most prominent "
                "intents in a conversation about {domain} between a client and "
                "an agent."
            ),
            expects="numbered_list",
        ),
        PromptTemplate(
            id="gen_utterances",
            body=(
                "Write {n} varied utterances to train a chatbot intent called "
                "{intent}, which is for {description}. {constraints}"
            ),
            expects="numbered_list",
        ),
        PromptTemplate(
            id="gen_entities",
            body=(
                "For designing a chatbot in the {domain} domain, give me a list "
                "of relevant named entities that the NLP back-end of the "
                "chatbot should be able to extract."
            ),
            expects="numbered_list",
        ),
        PromptTemplate(
            id="gen_synonyms",
            body=(
                "For designing a chatbot in the domain of {domain}, give me a "
                "synonym list for the word “{term}”."
            ),
        ),
        PromptTemplate(
            id="gen_persona",
            body="Describe the traits of a good {role} in max. 100 words.",
        ),
        PromptTemplate(
            id="localize",
            body=(
                "Translate this statement into {language}. Reply with only the "
                "translation.\n\n{statement}"
            ),
        ),
    ]:
        registry.register(template)
    return registry


class Gateway:
    """Renders prompts, calls the provider, and logs every exchange."""

    def __init__(self, provider, registry: PromptRegistry | None = None,
                 audit_log: AuditLog | None = None,
                 default_params: GenerationParams | None = None):
        self.provider = provider
        self.registry = registry or default_registry()
        self.audit_log = audit_log or AuditLog()
        self.default_params = default_params or GenerationParams()

    def render_prompt(self, template_id: str, bindings: dict[str, str]) -> str:
        template = self.registry.get(template_id)
        missing = extract_placeholders(template.body) - set(bindings)
        if missing:
            raise MissingBinding(sorted(missing)[0])
        return substitute(template.body, bindings)

    def complete(
        self,
        template_id: str,
        bindings: dict[str, str] | None = None,
        context: list[dict[str, str]] | None = None,
        params: GenerationParams | None = None,
    ) -> str:
        template = self.registry.get(template_id)
        prompt = self.render_prompt(template_id, bindings or {})
        effective = params or template.params_override or self.default_params
        clipped = (context or [])[-effective.history_window:]
        started = time.monotonic()
        response: str | None = None
        error: str | None = None
        try:
            response = self.provider.complete(
                prompt=prompt, context=clipped, params=effective,
                template_id=template_id,
            )
            response = response.rstrip()
            return response
        except ProviderError as exc:
            error = f"{type(exc).__name__}: {exc}"
            raise
        finally:
            self.audit_log.append(LLMExchange(
                exchange_id=uuid.uuid4().hex,
                template_id=template_id,
                prompt=prompt,
                context=clipped,
                params=effective.to_dict(),
                provider_id=getattr(self.provider, "provider_id", "unknown"),
                response=response,
                error=error,
                latency=time.monotonic() - started,
                timestamp=time.time(),
            ))


_NUMBERED_RE = re.compile(r"^\s*\d+\s*[.)]\s*(.*\S)\s*$")


def parse_numbered_list(text: str) -> list[str]:
    """Collect `N.` / `N)` prefixed lines in order, prefixes stripped."""
    items = []
    for line in text.splitlines():
        match = _NUMBERED_RE.match(line)
        if match:
            items.append(match.group(1))
    if not items:
        raise EmptyList("no numbered lines found")
    return items
