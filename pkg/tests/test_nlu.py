import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dialogkit import nlu, sampledata
from dialogkit.errors import EmptyUtterance, UntrainableIntent, WrongEntityKind
from dialogkit.project import (
    EntityDef,
    IntentDef,
    PersonaDef,
    ProjectConfig,
    ResponseTemplate,
    TemplateVariant,
    TrainingExample,
)


def _mini_config(corpus):
    """corpus: dict intent -> list of texts."""
    return ProjectConfig(
        name="mini",
        intents=[
            IntentDef(name=name, examples=[
                TrainingExample(text=t, provenance="human") for t in texts
            ])
            for name, texts in corpus.items()
        ],
        templates=[ResponseTemplate(
            key="fallback_apology",
            variants=[TemplateVariant(locale="en", persona="default",
                                      texts=["sorry"])],
        )],
        persona=PersonaDef(),
    )


class TestNormalize:
    def test_lowercase_and_split(self):
        assert nlu.normalize("Hello, World!") == ["hello", "world"]

    def test_digits_kept(self):
        assert nlu.normalize("transfer 400 USD") == ["transfer", "400", "usd"]

    def test_unicode_nfc(self):
        # decomposed é must match the composed form
        assert nlu.normalize("café") == nlu.normalize("café")

    def test_empty(self):
        assert nlu.normalize("  ?!  ") == []


class TestTrain:
    def test_provenance_filter(self):
        config = _mini_config({"a": ["alpha one"], "b": ["beta two"]})
        config.intents[0].examples.append(
            TrainingExample(text="generated junk", provenance="generated"))
        config.intents[0].examples.append(
            TrainingExample(text="rejected junk", provenance="rejected"))
        model = nlu.train(config)
        texts = [t for _, _, t in model.example_vectors]
        assert "generated junk" not in texts
        assert "rejected junk" not in texts
        assert model.total_examples == 2

    def test_approved_is_usable(self):
        config = _mini_config({"a": ["alpha"], "b": ["beta"]})
        config.intents[0].examples.append(
            TrainingExample(text="also alpha", provenance="approved"))
        assert nlu.train(config).total_examples == 3

    def test_untrainable_intent(self):
        config = _mini_config({"a": ["alpha"], "b": ["beta"]})
        config.intents[1].examples = [
            TrainingExample(text="only generated", provenance="generated")]
        with pytest.raises(UntrainableIntent):
            nlu.train(config)

    def test_idf_formula(self):
        model = nlu.train(_mini_config({
            "a": ["common rare"], "b": ["common other"]}))
        # "common" in both docs, "rare" in one
        assert model.idf["common"] == pytest.approx(math.log(3 / 3) + 1)
        assert model.idf["rare"] == pytest.approx(math.log(3 / 2) + 1)

    def test_vectors_l2_normalized(self, trained_model):
        for _, vector, _ in trained_model.example_vectors:
            norm = math.sqrt(sum(w * w for w in vector.values()))
            assert norm == pytest.approx(1.0, abs=1e-9)


class TestClassify:
    def test_exact_match_scores_one(self, trained_model):
        for _, _, text in trained_model.example_vectors:
            prediction = nlu.classify(trained_model, text)
            assert prediction.confidence == pytest.approx(1.0, abs=1e-9)

    def test_empty_utterance(self, trained_model):
        with pytest.raises(EmptyUtterance):
            nlu.classify(trained_model, "!!!")

    def test_below_tau_oos_is_none(self, trained_model):
        prediction = nlu.classify(trained_model, "Where is Germany?", 0.35)
        assert prediction.intent is None
        assert prediction.confidence < 0.35

    def test_ranked_sorted_descending(self, trained_model):
        prediction = nlu.classify(trained_model, "I want to cancel my account")
        scores = [s for _, s in prediction.ranked]
        assert scores == sorted(scores, reverse=True)

    def test_tie_break_lexicographic(self):
        # identical docs for two intents: tie must go to the earlier name
        model = nlu.train(_mini_config({
            "zeta": ["same words"], "alpha": ["same words"]}))
        prediction = nlu.classify(model, "same words")
        assert prediction.intent == "alpha"

    def test_allowed_intents_restricts(self, trained_model):
        prediction = nlu.classify(
            trained_model, "I want to cancel my account",
            allowed_intents={"pay_bill", "check_balance"})
        assert all(name in {"pay_bill", "check_balance"}
                   for name, _ in prediction.ranked)

    def test_all_oov_scores_zero(self, trained_model):
        prediction = nlu.classify(trained_model, "zzz qqq www")
        assert prediction.confidence == 0.0
        assert prediction.intent is None


class TestCosineOracle:
    """classify must agree with a brute-force dense tf-idf cosine."""

    @staticmethod
    def _dense_scores(corpus, query_tokens):
        docs = [(intent, nlu.normalize(t)) for intent, texts in corpus.items()
                for t in texts]
        n = len(docs)
        vocab = sorted({t for _, tokens in docs for t in tokens})
        index = {t: i for i, t in enumerate(vocab)}
        df = np.zeros(len(vocab))
        for _, tokens in docs:
            for t in set(tokens):
                df[index[t]] += 1
        idf = np.log((1 + n) / (1 + df)) + 1

        def vec(tokens):
            v = np.zeros(len(vocab))
            for t in tokens:
                if t in index:
                    v[index[t]] += 1
            v = v * idf
            norm = np.linalg.norm(v)
            return v / norm if norm > 0 else v

        q = vec(query_tokens)
        best = {}
        for intent, tokens in docs:
            score = float(np.dot(q, vec(tokens)))
            best[intent] = max(best.get(intent, -1.0), score)
        return best

    def test_random_corpora_match(self):
        rng = random.Random(20260823)
        words = [f"w{i}" for i in range(30)]
        for _ in range(100):
            n_intents = rng.randint(2, 4)
            corpus = {}
            for i in range(n_intents):
                corpus[f"intent_{i}"] = [
                    " ".join(rng.choices(words, k=rng.randint(1, 8)))
                    for _ in range(rng.randint(1, 3))
                ]
            model = nlu.train(_mini_config(corpus))
            query = " ".join(rng.choices(words, k=rng.randint(1, 8)))
            prediction = nlu.classify(model, query, tau_oos=0.0)
            dense = self._dense_scores(corpus, nlu.normalize(query))
            for name, score in prediction.ranked:
                assert score == pytest.approx(dense[name], abs=1e-9)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(
        st.text(alphabet="abcdef ", min_size=1, max_size=20)
        .filter(lambda t: nlu.normalize(t)),
        min_size=2, max_size=6))
    def test_confidence_bounded(self, texts):
        corpus = {"a": texts[: len(texts) // 2] or texts[:1],
                  "b": texts[len(texts) // 2:] or texts[-1:]}
        model = nlu.train(_mini_config(corpus))
        prediction = nlu.classify(model, texts[0], tau_oos=0.0)
        assert -1e-9 <= prediction.confidence <= 1.0 + 1e-9


class TestEntities:
    def test_account_number(self, config):
        matches = nlu.extract_entities(config, "My bank account is 334402")
        assert [(m.entity, m.value) for m in matches] == [
            ("account_number", "334402")]

    def test_street(self, config):
        matches = nlu.extract_entities(config, "It's Park Avenue 14")
        assert ("street", "Park Avenue 14") in [
            (m.entity, m.value) for m in matches]

    def test_five_digit_number_is_postal_code(self, config):
        # exact-span tie: postal_code is declared before account_number
        matches = nlu.extract_entities(config, "I live in 10012 New York.")
        found = {(m.entity, m.value) for m in matches}
        assert ("postal_code", "10012") in found
        assert ("city", "New York") in found
        assert not any(m.entity == "account_number" for m in matches)

    def test_amount_normalized(self, config):
        matches = nlu.extract_entities(
            config, "I want to transfer 400 Dollars to account number 831123")
        found = {(m.entity, m.value) for m in matches}
        assert ("amount", "400 USD") in found
        assert ("account_number", "831123") in found

    def test_gazetteer_synonym_maps_to_canonical(self, config):
        matches = nlu.extract_entities(config, "I am completely broke")
        assert [(m.entity, m.value) for m in matches] == [
            ("financial_status", "insolvent")]

    def test_gazetteer_token_boundary(self, config):
        # "Broke" must not fire inside a larger word
        assert nlu.extract_entities(config, "the brokerage called") == []

    def test_overlap_leftmost_longest(self, config):
        # "New York City" (synonym) should win over plain "New York"
        matches = nlu.extract_entities(config, "I moved to New York City")
        city = [m for m in matches if m.entity == "city"]
        assert len(city) == 1
        assert city[0].raw == "New York City"
        assert city[0].value == "New York"

    def test_case_insensitive(self, config):
        matches = nlu.extract_entities(config, "i live in zurich")
        assert [(m.entity, m.value) for m in matches] == [("city", "Zurich")]

    def test_offsets_valid(self, config):
        text = "Send 250 Euros to account number 55512345 in Geneva"
        for m in nlu.extract_entities(config, text):
            assert text[m.start:m.end] == m.raw


class TestSynonymCanonical:
    def test_lookup(self, config):
        assert nlu.synonym_canonical(
            config, "financial_status", "bankrupt") == "insolvent"

    def test_canonical_itself(self, config):
        assert nlu.synonym_canonical(
            config, "financial_status", "Insolvent") == "insolvent"

    def test_unknown_term(self, config):
        assert nlu.synonym_canonical(config, "financial_status", "rich") is None

    def test_wrong_kind(self, config):
        with pytest.raises(WrongEntityKind):
            nlu.synonym_canonical(config, "account_number", "x")


class TestCorpusQuality:
    def test_self_retrieval_perfect(self, trained_model):
        for intent, _, text in trained_model.example_vectors:
            prediction = nlu.classify(trained_model, text)
            assert prediction.intent == intent
            assert prediction.confidence == pytest.approx(1.0, abs=1e-9)

    def test_corpus_shape(self, config):
        assert len(config.intents) == 5
        for intent in config.intents:
            assert len(intent.usable_examples()) == 10
        cancel = config.intent("cancel_account")
        assert [e.text for e in cancel.examples] == \
            sampledata.CANCEL_ACCOUNT_UTTERANCES
