import random
import string

import pytest

from dialogkit import boosters, sampledata
from dialogkit.boosters import HandoffSummary
from dialogkit.dialog import TurnRecord
from dialogkit.errors import FormatParseError, ProviderError
from dialogkit.gateway import Gateway
from dialogkit.project import ClosedQAPolicy

from conftest import StubProvider


@pytest.fixture
def policy(config):
    return config.closed_qa


class TestOutOfScope:
    def test_passes_general_knowledge(self, policy):
        gateway = Gateway(StubProvider(
            responses={"out_of_scope": "Germany is in Europe."}))
        answer, activation = boosters.answer_out_of_scope(
            gateway, "Where is Germany?", policy)
        assert answer == "Germany is in Europe."
        assert activation.guard_outcome == "passed"

    def test_refusal_routes_to_default(self, policy):
        gateway = Gateway(StubProvider(
            responses={"out_of_scope": "FINANCIAL_ADVICE_REFUSED"}))
        answer, activation = boosters.answer_out_of_scope(
            gateway, "What stocks should I buy?", policy)
        assert answer == policy.default_answer
        assert activation.guard_outcome == "substituted_default"

    def test_provider_error_propagates(self, policy):
        gateway = Gateway(StubProvider(error=ProviderError("down")))
        with pytest.raises(ProviderError):
            boosters.answer_out_of_scope(gateway, "Where is Germany?", policy)


class TestDisambiguate:
    def test_passes(self):
        gateway = Gateway(StubProvider(
            responses={"disambiguation": "Pay a bill, or cancel the account?"}))
        question, activation = boosters.disambiguate(
            gateway, "cancel the bill", ["pay_bill", "cancel_account"])
        assert question == "Pay a bill, or cancel the account?"
        assert activation.guard_outcome == "passed"

    def test_fallback_question_names_both(self):
        gateway = Gateway(StubProvider(error=ProviderError("down")))
        question, activation = boosters.disambiguate(
            gateway, "cancel the bill", ["pay_bill", "cancel_account"])
        assert "pay bill" in question
        assert "cancel account" in question
        assert activation.guard_outcome == "substituted_default"


class TestRephrase:
    def test_passes(self):
        gateway = Gateway(StubProvider(responses={"rephrase": "New text 42."}))
        out, activation = boosters.rephrase(
            gateway, "Old text 42.", "more simply", must_keep=["42"])
        assert out == "New text 42."
        assert activation.guard_outcome == "passed"

    def test_must_keep_guard_rejects(self):
        gateway = Gateway(StubProvider(
            responses={"rephrase": "Rewritten without the number."}))
        out, activation = boosters.rephrase(
            gateway, "Transfer 400 USD to 831123.", "politely",
            must_keep=["400 USD", "831123"])
        assert out == "Transfer 400 USD to 831123."
        assert activation.guard_outcome == "rejected"

    def test_provider_error_keeps_original(self):
        gateway = Gateway(StubProvider(error=ProviderError("down")))
        out, activation = boosters.rephrase(gateway, "Keep me.", "fancier")
        assert out == "Keep me."
        assert activation.guard_outcome == "rejected"


class TestClosedQA:
    def test_verbatim_answer_passes(self, policy):
        gateway = Gateway(StubProvider(
            responses={"closed_qa": policy.answers[2]}))
        answer, activation = boosters.closed_qa(gateway, "I want to quit", policy)
        assert answer == policy.answers[2]
        assert activation.guard_outcome == "passed"

    def test_whitespace_normalized_match(self, policy):
        sloppy = policy.answers[0].replace(" ", "  ") + "\n"
        gateway = Gateway(StubProvider(responses={"closed_qa": sloppy}))
        answer, activation = boosters.closed_qa(gateway, "new address", policy)
        assert answer == policy.answers[0]
        assert activation.guard_outcome == "passed"

    def test_case_difference_is_rejected(self, policy):
        gateway = Gateway(StubProvider(
            responses={"closed_qa": policy.answers[0].upper()}))
        answer, activation = boosters.closed_qa(gateway, "address", policy)
        assert answer == policy.default_answer
        assert activation.guard_outcome == "substituted_default"

    def test_off_contract_substituted(self, policy):
        gateway = Gateway(StubProvider(
            responses={"closed_qa": "Sure! Just do it online."}))
        answer, activation = boosters.closed_qa(gateway, "anything", policy)
        assert answer == policy.default_answer
        assert activation.guard_outcome == "substituted_default"

    def test_provider_error_substituted(self, policy):
        gateway = Gateway(StubProvider(error=ProviderError("down")))
        answer, activation = boosters.closed_qa(gateway, "anything", policy)
        assert answer == policy.default_answer

    def test_totality_fuzz_1000(self, policy):
        """Whatever the provider emits, the output is an allowed answer or
        the default - 1,000 trials, no exceptions tolerated."""
        rng = random.Random(20260823)
        allowed = set(policy.answers) | {policy.default_answer}
        outputs = []
        for _ in range(1000):
            roll = rng.random()
            if roll < 0.3:  # random garbage
                text = "".join(rng.choices(string.printable, k=rng.randint(0, 80)))
            elif roll < 0.6:  # near-miss: altered punctuation/case
                base = rng.choice(policy.answers)
                text = base.rstrip(".") + rng.choice(["!", "?", "...", ""])
                if rng.random() < 0.5:
                    text = text.capitalize()
            elif roll < 0.8:  # verbatim with sloppy whitespace
                text = "  " + rng.choice(policy.answers).replace(" ", "  ")
            else:
                text = policy.default_answer
            outputs.append(text)
        iterator = iter(outputs)
        gateway = Gateway(StubProvider(fn=lambda t, p: next(iterator)))
        for _ in range(1000):
            answer, _ = boosters.closed_qa(gateway, "q", policy)
            assert answer in allowed


class TestSummarize:
    def test_parses_labels(self):
        gateway = Gateway(StubProvider(responses={
            "summarize": "Agent Action Required: Call the client.\n"
                         "Summary: The client asked for a callback."}))
        summary = boosters.summarize(gateway, [TurnRecord("user", "call me")])
        assert summary == HandoffSummary(
            action_required="Call the client.",
            summary="The client asked for a callback.")

    def test_retry_once_then_succeeds(self):
        provider = StubProvider(responses={
            "summarize": "no labels at all",
            "summarize_retry": "Agent Action Required: A.\nSummary: B.",
        })
        gateway = Gateway(provider)
        summary = boosters.summarize(gateway, [TurnRecord("user", "hi")])
        assert summary.action_required == "A."
        assert [t for t, _ in provider.calls] == ["summarize", "summarize_retry"]

    def test_exactly_one_retry_then_error(self):
        provider = StubProvider(responses={
            "summarize": "nope", "summarize_retry": "still nope"})
        gateway = Gateway(provider)
        with pytest.raises(FormatParseError):
            boosters.summarize(gateway, [TurnRecord("user", "hi")])
        assert len(provider.calls) == 2

    def test_empty_section_is_format_error(self):
        provider = StubProvider(responses={
            "summarize": "Agent Action Required:\nSummary:",
            "summarize_retry": "Agent Action Required:\nSummary:"})
        with pytest.raises(FormatParseError):
            boosters.summarize(Gateway(provider), [TurnRecord("user", "hi")])

    def test_no_user_turns_rejected(self):
        gateway = Gateway(StubProvider())
        with pytest.raises(ValueError):
            boosters.summarize(gateway, [TurnRecord("bot", "hello")])

    def test_transcript_speaker_labels(self):
        provider = StubProvider(responses={
            "summarize": "Agent Action Required: A.\nSummary: B."})
        gateway = Gateway(provider)
        boosters.summarize(gateway, [
            TurnRecord("bot", "Hi, how can I help?"),
            TurnRecord("user", "My card broke"),
        ])
        prompt = provider.calls[0][1]
        assert "Chatbot: Hi, how can I help?" in prompt
        assert "User: My card broke" in prompt


class TestAutocorrect:
    def test_delegates_to_gateway(self):
        provider = StubProvider(responses={"autocorrect": "I want to cancel"})
        assert boosters.autocorrect(Gateway(provider), "wunt 2 cancal") == \
            "I want to cancel"
        assert "wunt 2 cancal" in provider.calls[0][1]
