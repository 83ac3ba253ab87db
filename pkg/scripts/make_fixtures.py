"""Regenerate the bundled mock-provider fixtures.

Each fixture is keyed by (template id, hash of the whitespace-normalized
rendered prompt), so the file must be regenerated whenever a prompt template
or any seeded input below changes:

    python3 scripts/make_fixtures.py
"""

from __future__ import annotations

import sys
from pathlib import Path

import yaml

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from dialogkit import boosters, sampledata  # noqa: E402
from dialogkit.dialog import TurnRecord  # noqa: E402
from dialogkit.gateway import default_registry, normalize_prompt, prompt_hash  # noqa: E402
from dialogkit.nlg import substitute  # noqa: E402

OUT_PATH = Path(__file__).resolve().parent.parent / "src" / "dialogkit" / "data" / "banking_fixtures.yaml"

GERMANY_ANSWER = (
    "Germany is a country located in Central Europe. It is bordered by "
    "Denmark, Poland, the Czech Republic, Austria, Switzerland, France, "
    "Luxembourg, Belgium and the Netherlands."
)

PAY_BILL_GENERATED = [
    "Could you settle my electricity invoice?",
    "I need to pay the invoice from my landlord",
    "Please arrange payment of my outstanding bills",
    "Settle the phone bill from my checking account",
    "I'd like to schedule a bill payment for Friday",
]

PERSONA_DESCRIPTION = (
    "A good client advisor in private banking possesses strong financial "
    "knowledge, excellent communication and interpersonal skills, and a deep "
    "understanding of clients' needs and goals. They maintain high ethical "
    "standards, practice discretion and confidentiality, and build "
    "long-lasting relationships based on trust. Additionally, they "
    "demonstrate adaptability, staying updated on market trends and "
    "regulations, and proactively identify opportunities to grow clients' "
    "wealth. They are also highly organized, adept at problem-solving, and "
    "excel at collaborating with various stakeholders to deliver tailored "
    "financial solutions."
)

RETRY_TRANSCRIPT = [TurnRecord("user", "I need help with my card")]
BAD_FORMAT_TRANSCRIPT = [TurnRecord("user", "goodbye")]


def _numbered(items: list[str]) -> str:
    return "\n".join(f"{i}. {text}" for i, text in enumerate(items, 1))


def _answers_block() -> str:
    return "\n".join(
        f"{i}.\t{answer}"
        for i, answer in enumerate(sampledata.CLOSED_QA_ANSWERS, 1)
    )


def _closed_qa_bindings(question: str) -> dict[str, str]:
    return {
        "question": question,
        "answers": _answers_block(),
        "default_answer": sampledata.CLOSED_QA_DEFAULT,
    }


def seeds() -> list[tuple[str, dict[str, str], str]]:
    items: list[tuple[str, dict[str, str], str]] = []

    # autocorrect: misspelled inputs plus identity passes for utterances that
    # are already correct but score below the confidence threshold
    for raw, corrected in [
        ("wunt to cancal this accunt", "I want to cancel this account"),
        ("i want 2 get rid of my acount", "I would like to delete my account"),
        ("Where is Germany?", "Where is Germany?"),
        ("can you cancel the bill for me?", "Can you cancel the bill for me?"),
        ("I want to change my account", "I want to change my account"),
        ("I live in 10012 New York.", "I live in 10012 New York."),
        ("What stocks should I buy?", "What stocks should I buy?"),
        # a correction gone wrong: the no-harm gate must keep the original
        ("pls fix my billz acount", "purple elephant dances"),
    ]:
        items.append(("autocorrect", {"utterance": raw}, corrected))

    items.append(("out_of_scope",
                  {"question": "Where is Germany?"}, GERMANY_ANSWER))
    items.append(("out_of_scope",
                  {"question": "What stocks should I buy?"},
                  "FINANCIAL_ADVICE_REFUSED"))

    items.append(("disambiguation", {
        "utterance": "can you cancel the bill for me?",
        "option_a": "pay bill", "option_b": "cancel account",
    }, "Just to be sure: would you like to pay bill, or would you rather "
       "cancel account?"))
    items.append(("disambiguation", {
        "utterance": "I want to change my account",
        "option_a": "change address", "option_b": "pay bill",
    }, "Could you clarify whether you want to change address or pay bill?"))

    items.append(("rephrase", {
        "text": sampledata.APOLOGY_LADDER[0],
        "directive": "in the style of British upper-class English",
    }, sampledata.APOLOGY_LADDER[8]))
    items.append(("rephrase", {
        "text": sampledata.LOCALIZED_STATEMENTS["product_unavailable"]["en"],
        "directive": "in simple English",
    }, "I'm sorry, but the product you are looking for is no longer available."))

    for question, answer in [
        ("I have a new address", sampledata.CLOSED_QA_ANSWERS[0]),
        ("How can I get an account with your company?",
         sampledata.CLOSED_QA_ANSWERS[1]),
        ("I want to quit", sampledata.CLOSED_QA_ANSWERS[2]),
        ("I forgot my pwd", sampledata.CLOSED_QA_ANSWERS[3]),
        ("What are the interest rates I need to pay for a mortgage?",
         sampledata.CLOSED_QA_DEFAULT + "."),
        # off-contract reply: the totality guard must substitute the default
        ("What is the meaning of life?", "The meaning of life is 42."),
    ]:
        items.append(("closed_qa", _closed_qa_bindings(question), answer))

    handoff_rendered = boosters._format_transcript(sampledata.HANDOFF_CONVERSATION)
    items.append(("summarize", {"transcript": handoff_rendered},
                  sampledata.HANDOFF_SUMMARY_RESPONSE))

    # a transcript whose first summary reply breaks the format, exercising
    # the single stricter retry
    retry_rendered = boosters._format_transcript(RETRY_TRANSCRIPT)
    items.append(("summarize", {"transcript": retry_rendered},
                  "The user needs help."))
    items.append(("summarize_retry", {"transcript": retry_rendered},
                  "Agent Action Required: Help the user with their card issue.\n"
                  "Summary: The user asked for help with their card and the "
                  "chatbot could not assist further."))

    # both attempts label-free: the summarizer must give up with a parse error
    bad_rendered = boosters._format_transcript(BAD_FORMAT_TRANSCRIPT)
    items.append(("summarize", {"transcript": bad_rendered},
                  "The user said goodbye."))
    items.append(("summarize_retry", {"transcript": bad_rendered},
                  "Nothing actionable happened."))

    items.append(("gen_intents", {"domain": "private banking", "n": "5"},
                  _numbered([
                      "Open account", "Card replacement", "Cancel account",
                      "Transfer funds", "Check balance",
                  ])))
    items.append(("gen_utterances", {
        "n": "10", "intent": "cancel_account",
        "description": "cancel account", "constraints": "",
    }, _numbered(sampledata.CANCEL_ACCOUNT_UTTERANCES)))
    items.append(("gen_utterances", {
        "n": "5", "intent": "pay_bill",
        "description": "pay bill", "constraints": "",
    }, _numbered(PAY_BILL_GENERATED)))
    items.append(("gen_entities", {"domain": "private banking"},
                  _numbered([
                      "Account number", "Amount", "Currency", "IBAN", "Date",
                      "Street",
                  ])))
    items.append(("gen_synonyms",
                  {"domain": "private banking", "term": "insolvent"},
                  ", ".join(sampledata.INSOLVENT_SYNONYMS)))
    items.append(("gen_persona",
                  {"role": "client advisor in private banking"},
                  PERSONA_DESCRIPTION))

    languages = {"de": "German", "de-CH-x-dialect": "Swiss German",
                 "es": "Spanish", "fr": "French"}
    for key, per_locale in sampledata.LOCALIZED_STATEMENTS.items():
        for locale, language in languages.items():
            items.append(("localize", {
                "language": language, "statement": per_locale["en"],
            }, per_locale[locale]))

    return items


def main() -> None:
    registry = default_registry()
    fixtures = []
    seen = set()
    for template_id, bindings, response in seeds():
        prompt = substitute(registry.get(template_id).body, bindings)
        digest = prompt_hash(prompt)
        key = (template_id, digest)
        if key in seen:
            raise SystemExit(f"duplicate fixture for {key}")
        seen.add(key)
        fixtures.append({
            "template_id": template_id,
            "prompt_hash": digest,
            "prompt_excerpt": normalize_prompt(prompt)[:80],
            "response": response,
        })
    OUT_PATH.parent.mkdir(parents=True, exist_ok=True)
    with open(OUT_PATH, "w", encoding="utf-8") as fh:
        yaml.safe_dump(fixtures, fh, allow_unicode=True, sort_keys=False,
                       width=78)
    print(f"wrote {len(fixtures)} fixtures to {OUT_PATH}")


if __name__ == "__main__":
    main()
