"""NLU stage: intent classification and entity extraction.

The classifier is a deterministic TF-IDF nearest-neighbor over the project's
approved training utterances: inspectable, exact-match-scores-1.0, no
learned weights. LLM boosters handle the hard cases upstream.
"""

from __future__ import annotations

import math
import re
import unicodedata
from dataclasses import dataclass, field

from .errors import EmptyUtterance, UntrainableIntent, WrongEntityKind
from .project import EntityDef, ProjectConfig

_TOKEN_RE = re.compile(r"[^0-9a-z]+")


def normalize(text: str) -> list[str]:
    """NFC, lowercase, split on non-alphanumeric runs, drop empties."""
    lowered = unicodedata.normalize("NFC", text).lower()
    return [t for t in _TOKEN_RE.split(lowered) if t]


@dataclass
class IntentModel:
    vocabulary: dict[str, int]
    idf: dict[str, float]
    # (intent name, L2-normalized sparse tf-idf vector, source text)
    example_vectors: list[tuple[str, dict[str, float], str]]
    total_examples: int


@dataclass
class IntentPrediction:
    intent: str | None
    confidence: float
    ranked: list[tuple[str, float]] = field(default_factory=list)


@dataclass
class EntityMatch:
    entity: str
    raw: str
    start: int
    end: int
    value: str
    extractor: str  # pattern | gazetteer


def _tfidf_vector(tokens: list[str], idf: dict[str, float]) -> dict[str, float]:
    counts: dict[str, int] = {}
    for token in tokens:
        if token in idf:
            counts[token] = counts.get(token, 0) + 1
    vector = {term: count * idf[term] for term, count in counts.items()}
    norm = math.sqrt(sum(w * w for w in vector.values()))
    if norm > 0:
        vector = {term: w / norm for term, w in vector.items()}
    return vector


def train(config: ProjectConfig) -> IntentModel:
    """Build the TF-IDF model from human/approved examples only.

    idf = ln((1+N)/(1+df)) + 1, vectors L2-normalized. Deterministic.
    """
    docs: list[tuple[str, str, list[str]]] = []
    for intent in config.intents:
        usable = intent.usable_examples()
        if not usable:
            raise UntrainableIntent(intent.name)
        for example in usable:
            docs.append((intent.name, example.text, normalize(example.text)))

    n_docs = len(docs)
    df: dict[str, int] = {}
    for _, _, tokens in docs:
        for term in set(tokens):
            df[term] = df.get(term, 0) + 1

    idf = {
        term: math.log((1 + n_docs) / (1 + count)) + 1.0
        for term, count in df.items()
    }
    vocabulary = {term: index for index, term in enumerate(sorted(idf))}
    vectors = [
        (intent_name, _tfidf_vector(tokens, idf), text)
        for intent_name, text, tokens in docs
    ]
    return IntentModel(
        vocabulary=vocabulary, idf=idf, example_vectors=vectors,
        total_examples=n_docs,
    )


def _cosine(a: dict[str, float], b: dict[str, float]) -> float:
    if len(b) < len(a):
        a, b = b, a
    return sum(weight * b.get(term, 0.0) for term, weight in a.items())


def classify(
    model: IntentModel,
    text: str,
    tau_oos: float = 0.35,
    allowed_intents: set[str] | None = None,
) -> IntentPrediction:
    """Nearest-neighbor cosine against training examples.

    score(intent) = max cosine over that intent's examples; ties broken by
    intent name so results are deterministic. allowed_intents restricts the
    candidate set (used after a disambiguation question).
    """
    tokens = normalize(text)
    if not tokens:
        raise EmptyUtterance(f"no tokens in {text!r}")
    query = _tfidf_vector(tokens, model.idf)

    best_per_intent: dict[str, float] = {}
    for intent_name, vector, _ in model.example_vectors:
        if allowed_intents is not None and intent_name not in allowed_intents:
            continue
        score = _cosine(query, vector)
        if score > best_per_intent.get(intent_name, -1.0):
            best_per_intent[intent_name] = score

    ranked = sorted(best_per_intent.items(), key=lambda kv: (-kv[1], kv[0]))
    if not ranked:
        return IntentPrediction(intent=None, confidence=0.0, ranked=[])
    confidence = ranked[0][1]
    intent = ranked[0][0] if confidence >= tau_oos else None
    return IntentPrediction(intent=intent, confidence=confidence, ranked=ranked)


_CURRENCY_CODES = {
    "dollar": "USD", "dollars": "USD", "usd": "USD", "$": "USD",
    "euro": "EUR", "euros": "EUR", "eur": "EUR", "€": "EUR",
    "franc": "CHF", "francs": "CHF", "chf": "CHF",
    "pound": "GBP", "pounds": "GBP", "gbp": "GBP", "£": "GBP",
}
_AMOUNT_NUM_RE = re.compile(r"\d+(?:\.\d+)?")


def _normalize_amount(raw: str) -> str:
    number = _AMOUNT_NUM_RE.search(raw)
    code = ""
    for token, value in _CURRENCY_CODES.items():
        if token in raw.lower():
            code = value
            break
    if number is None:
        return raw
    return f"{number.group(0)} {code}".strip()


_NORMALIZERS = {"amount": _normalize_amount}


def _pattern_matches(entity: EntityDef, text: str) -> list[EntityMatch]:
    normalizer = _NORMALIZERS.get(entity.normalizer or "")
    matches = []
    for m in re.finditer(entity.pattern, text, re.IGNORECASE):
        raw = m.group(0)
        matches.append(EntityMatch(
            entity=entity.name, raw=raw, start=m.start(), end=m.end(),
            value=normalizer(raw) if normalizer else raw, extractor="pattern",
        ))
    return matches


def _gazetteer_matches(entity: EntityDef, text: str) -> list[EntityMatch]:
    matches = []
    for canonical, synonyms in entity.values:
        for surface in [canonical, *synonyms]:
            pattern = r"\b" + re.escape(surface) + r"\b"
            for m in re.finditer(pattern, text, re.IGNORECASE):
                matches.append(EntityMatch(
                    entity=entity.name, raw=m.group(0), start=m.start(),
                    end=m.end(), value=canonical, extractor="gazetteer",
                ))
    return matches


def extract_entities(config: ProjectConfig, text: str) -> list[EntityMatch]:
    """All entity matches, overlaps resolved leftmost-longest.

    Exact-span ties go to the entity defined first in the project, which makes
    extraction order-deterministic (e.g. a 5-digit number is a postal code, not
    an account number, when postal_code is declared first).
    """
    candidates: list[tuple[int, EntityMatch]] = []
    for order, entity in enumerate(config.entities):
        if entity.kind == "pattern" and entity.pattern:
            found = _pattern_matches(entity, text)
        elif entity.kind == "gazetteer":
            found = _gazetteer_matches(entity, text)
        else:
            found = []
        candidates.extend((order, m) for m in found)

    candidates.sort(key=lambda om: (om[1].start, -(om[1].end - om[1].start), om[0]))
    chosen: list[EntityMatch] = []
    occupied_until = -1
    for _, match in candidates:
        if match.start >= occupied_until:
            chosen.append(match)
            occupied_until = match.end
    return chosen


def synonym_canonical(config: ProjectConfig, entity_name: str, term: str) -> str | None:
    """Case-insensitive synonym -> canonical lookup for gazetteer entities."""
    entity = config.entity(entity_name)
    if entity is None or entity.kind != "gazetteer":
        raise WrongEntityKind(f"'{entity_name}' is not a gazetteer entity")
    wanted = term.strip().lower()
    for canonical, synonyms in entity.values:
        if wanted == canonical.lower():
            return canonical
        if any(wanted == s.lower() for s in synonyms):
            return canonical
    return None
