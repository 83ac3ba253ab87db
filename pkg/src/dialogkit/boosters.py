"""Runtime LLM interventions, each wrapped in a guard so the pipeline stays in
control: any provider failure or off-contract output degrades to pipeline-only
behavior, never an unhandled error."""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

from .dialog import TurnRecord
from .errors import FormatParseError, ProviderError
from .gateway import Gateway
from .project import ClosedQAPolicy

REFUSAL_MARKER = "FINANCIAL_ADVICE_REFUSED"


@dataclass
class BoosterActivation:
    kind: str
    input_text: str
    output_text: str
    guard_outcome: str  # passed | substituted_default | rejected

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "input": self.input_text,
            "output": self.output_text,
            "guard_outcome": self.guard_outcome,
        }


@dataclass
class HandoffSummary:
    action_required: str
    summary: str


def autocorrect(gateway: Gateway, text: str) -> str:
    """LLM spelling/grammar correction; the caller re-runs NLU and applies the
    no-harm guard (keep the original when the correction scores no better)."""
    return gateway.complete("autocorrect", {"utterance": text})


def answer_out_of_scope(
    gateway: Gateway, question: str, policy: ClosedQAPolicy | None = None
) -> tuple[str, BoosterActivation]:
    """General-knowledge answer. A refusal of financial advice routes to the
    closed-QA default answer. Provider errors propagate (caller falls back to
    the apology ladder)."""
    answer = gateway.complete("out_of_scope", {"question": question})
    if REFUSAL_MARKER in answer and policy is not None and policy.default_answer:
        return policy.default_answer, BoosterActivation(
            "out_of_scope", question, policy.default_answer, "substituted_default"
        )
    return answer, BoosterActivation("out_of_scope", question, answer, "passed")


def _describe_intent(name: str) -> str:
    return name.replace("_", " ")


def disambiguate(
    gateway: Gateway, text: str, candidates: list[str]
) -> tuple[str, BoosterActivation]:
    """One clarification question offering the top-2 readings. Falls back to a
    plain either/or template when the provider fails."""
    option_a = _describe_intent(candidates[0])
    option_b = _describe_intent(candidates[1])
    try:
        question = gateway.complete("disambiguation", {
            "utterance": text, "option_a": option_a, "option_b": option_b,
        })
        outcome = "passed"
    except ProviderError:
        question = f"Did you mean {option_a} or {option_b}?"
        outcome = "substituted_default"
    return question, BoosterActivation("disambiguation", text, question, outcome)


def rephrase(
    gateway: Gateway, text: str, directive: str, must_keep: list[str] | None = None
) -> tuple[str, BoosterActivation]:
    """Stylistic rephrasing with a content guard: every bound value must
    survive verbatim, else the original text is kept."""
    try:
        candidate = gateway.complete("rephrase", {"text": text, "directive": directive})
    except ProviderError:
        return text, BoosterActivation("rephrase", text, text, "rejected")
    for value in must_keep or []:
        if value not in candidate:
            return text, BoosterActivation("rephrase", text, text, "rejected")
    return candidate, BoosterActivation("rephrase", text, candidate, "passed")


def _normalize_answer(text: str) -> str:
    return re.sub(r"\s+", " ", unicodedata.normalize("NFC", text)).strip()


def closed_qa(
    gateway: Gateway, question: str, policy: ClosedQAPolicy
) -> tuple[str, BoosterActivation]:
    """Hallucination-proof Q&A: the return value is ALWAYS an element of
    policy.answers or the default answer, whatever the provider produced."""
    answers_block = "\n".join(
        f"{index}.\t{answer}" for index, answer in enumerate(policy.answers, 1)
    )
    try:
        raw = gateway.complete(policy.prompt_template, {
            "question": question,
            "answers": answers_block,
            "default_answer": policy.default_answer,
        })
    except ProviderError:
        return policy.default_answer, BoosterActivation(
            "closed_qa", question, policy.default_answer, "substituted_default"
        )
    normalized = _normalize_answer(raw)
    for answer in policy.answers:
        if normalized == _normalize_answer(answer):
            return answer, BoosterActivation("closed_qa", question, answer, "passed")
    if normalized == _normalize_answer(policy.default_answer):
        return policy.default_answer, BoosterActivation(
            "closed_qa", question, policy.default_answer, "passed"
        )
    return policy.default_answer, BoosterActivation(
        "closed_qa", question, policy.default_answer, "substituted_default"
    )


_SUMMARY_RE = re.compile(
    r"Agent Action Required:\s*(?P<action>.*?)\s*Summary:\s*(?P<summary>.*)\s*$",
    re.DOTALL,
)


def _format_transcript(transcript: list[TurnRecord]) -> str:
    lines = []
    for turn in transcript:
        speaker = "Chatbot" if turn.speaker == "bot" else "User"
        lines.append(f"{speaker}: {turn.text}")
    return "\n".join(lines)


def _parse_summary(raw: str) -> HandoffSummary:
    match = _SUMMARY_RE.search(raw)
    if not match:
        raise FormatParseError("response missing 'Agent Action Required:'/'Summary:' labels")
    action = match.group("action").strip()
    summary = match.group("summary").strip()
    if not action or not summary:
        raise FormatParseError("empty action or summary section")
    return HandoffSummary(action_required=action, summary=summary)


def summarize(gateway: Gateway, transcript: list[TurnRecord]) -> HandoffSummary:
    """Two-label handoff summary; one stricter retry before giving up."""
    if not any(t.speaker == "user" for t in transcript):
        raise ValueError("transcript has no user turns to summarize")
    rendered = _format_transcript(transcript)
    raw = gateway.complete("summarize", {"transcript": rendered})
    try:
        return _parse_summary(raw)
    except FormatParseError:
        raw = gateway.complete("summarize_retry", {"transcript": rendered})
        return _parse_summary(raw)
