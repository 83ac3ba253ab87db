import pytest
import yaml

from dialogkit.errors import MissingFile, ParseError, ValidationError
from dialogkit.project import (
    PersonaDef,
    ProjectConfig,
    ResponseTemplate,
    TemplateVariant,
    extract_placeholders,
    load_project,
    save_project,
    validate,
)


class TestPlaceholders:
    def test_extract(self):
        assert extract_placeholders("hi {name}, {amount} sent") == \
            {"name", "amount"}

    def test_escaped_braces_ignored(self):
        assert extract_placeholders("literal {{brace}} here") == set()

    def test_invalid_names_ignored(self):
        assert extract_placeholders("{Name} {1x} {ok_name}") == {"ok_name"}


class TestValidate:
    def test_sample_project_valid(self, config):
        assert validate(config) == []

    def test_duplicate_intent_name(self, config):
        config.intents.append(config.intents[0])
        assert any("duplicate" in v for v in validate(config))

    def test_bad_intent_name(self, config):
        config.intents[0].name = "Cancel-Account"
        assert any("snake_case" in v or "name" in v for v in validate(config))

    def test_untrainable_intent_flagged(self, config):
        for example in config.intents[0].examples:
            example.provenance = "generated"
        assert any("usable" in v or "trainable" in v.lower()
                   for v in validate(config))

    def test_form_unknown_trigger(self, config):
        config.forms[0].trigger_intent = "no_such_intent"
        assert any("no_such_intent" in v for v in validate(config))

    def test_form_unknown_entity_type(self, config):
        config.forms[0].slots[0].entity_type = "no_such_entity"
        assert any("no_such_entity" in v for v in validate(config))

    def test_template_missing_default_variant(self, config):
        template = config.template("greeting")
        template.variants = [TemplateVariant(locale="de", persona="default",
                                             texts=["Hallo"])]
        assert any("greeting" in v for v in validate(config))

    def test_undeclared_locale(self, config):
        config.template("greeting").variants.append(
            TemplateVariant(locale="xx", persona="default", texts=["?"]))
        assert any("xx" in v for v in validate(config))

    def test_closed_qa_default_must_differ(self, config):
        config.closed_qa.default_answer = config.closed_qa.answers[0]
        assert any("default" in v for v in validate(config))

    def test_threshold_ordering(self, config):
        config.thresholds.tau_oos = 0.9
        assert any("tau" in v for v in validate(config))

    def test_gazetteer_synonym_collision(self, config):
        entity = config.entity("financial_status")
        entity.values.append(("wealthy", ["broke"]))
        assert any("broke" in v.lower() for v in validate(config))

    def test_all_violations_reported_together(self, config):
        config.intents.append(config.intents[0])
        config.thresholds.tau_oos = 0.9
        assert len(validate(config)) >= 2


class TestStore:
    def test_round_trip(self, config, tmp_path):
        save_project(config, tmp_path / "proj")
        loaded = load_project(tmp_path / "proj")
        assert loaded == config

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(MissingFile):
            load_project(tmp_path / "nowhere")

    def test_parse_error(self, config, tmp_path):
        save_project(config, tmp_path / "proj")
        (tmp_path / "proj" / "intents.yaml").write_text("{ not: [valid")
        with pytest.raises(ParseError):
            load_project(tmp_path / "proj")

    def test_validation_error_carries_all_violations(self, config, tmp_path):
        save_project(config, tmp_path / "proj")
        doc = yaml.safe_load((tmp_path / "proj" / "intents.yaml").read_text())
        doc["intents"].append(doc["intents"][0])  # duplicate name
        doc["intents"][1]["name"] = "Bad Name"    # bad identifier
        (tmp_path / "proj" / "intents.yaml").write_text(yaml.safe_dump(doc))
        with pytest.raises(ValidationError) as excinfo:
            load_project(tmp_path / "proj")
        assert len(excinfo.value.violations) >= 2

    def test_atomic_write_leaves_no_temp_files(self, config, tmp_path):
        save_project(config, tmp_path / "proj")
        leftovers = list((tmp_path / "proj").glob("*.tmp"))
        assert leftovers == []

    def test_save_rewrites_cleanly(self, config, tmp_path):
        save_project(config, tmp_path / "proj")
        config.intents[0].examples[0].text = "changed utterance"
        save_project(config, tmp_path / "proj")
        loaded = load_project(tmp_path / "proj")
        assert loaded.intents[0].examples[0].text == "changed utterance"

    def test_invalid_project_not_loadable(self, tmp_path):
        bad = ProjectConfig(
            name="bad",
            templates=[ResponseTemplate(
                key="fallback_apology",
                variants=[TemplateVariant(locale="en", persona="default",
                                          texts=["sorry"])])],
            persona=PersonaDef(),
        )
        # no intents at all: still saves (save is mechanical) ...
        save_project(bad, tmp_path / "proj")
        # ... but load re-validates
        with pytest.raises(ValidationError):
            load_project(tmp_path / "proj")
