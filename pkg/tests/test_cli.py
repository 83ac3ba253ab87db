import yaml
from click.testing import CliRunner

from dialogkit.cli import main

from conftest import FIXTURES_PATH


def _run(*args, **kwargs):
    return CliRunner().invoke(main, list(args), **kwargs)


class TestInitValidateTrain:
    def test_init_then_validate_then_train(self, tmp_path):
        project = str(tmp_path / "proj")
        result = _run("--project", project, "init")
        assert result.exit_code == 0, result.output

        result = _run("--project", project, "validate")
        assert result.exit_code == 0
        assert "valid" in result.output

        result = _run("--project", project, "train")
        assert result.exit_code == 0
        assert "50 examples" in result.output
        assert "5 intents" in result.output

    def test_init_refuses_overwrite(self, tmp_path):
        project = str(tmp_path / "proj")
        _run("--project", project, "init")
        result = _run("--project", project, "init")
        assert result.exit_code == 1

    def test_validate_reports_violations(self, tmp_path):
        project = tmp_path / "proj"
        _run("--project", str(project), "init")
        doc = yaml.safe_load((project / "intents.yaml").read_text())
        doc["intents"].append(doc["intents"][0])
        (project / "intents.yaml").write_text(yaml.safe_dump(doc))
        result = _run("--project", str(project), "validate")
        assert result.exit_code == 1
        assert "invalid" in result.output

    def test_missing_project_fails(self, tmp_path):
        result = _run("--project", str(tmp_path / "nope"), "validate")
        assert result.exit_code == 1

    def test_unknown_option_is_usage_error(self):
        result = _run("--no-such-flag")
        assert result.exit_code == 2


class TestChat:
    def test_scripted_session(self, tmp_path):
        project = str(tmp_path / "proj")
        _run("--project", project, "init")
        result = _run("--project", project, "--fixtures", FIXTURES_PATH,
                      "chat", input="Tell me my current balance\n/quit\n")
        assert result.exit_code == 0
        assert "bot>" in result.output


class TestGenReview:
    def test_gen_stage_approve_cycle(self, tmp_path):
        project = str(tmp_path / "proj")
        _run("--project", project, "init")

        result = _run("--project", project, "--fixtures", FIXTURES_PATH,
                      "gen", "utterances", "--intent", "pay_bill", "-n", "5")
        assert result.exit_code == 0, result.output
        assert result.output.count("staged utterance") == 5

        result = _run("--project", project, "review", "list")
        assert result.exit_code == 0
        item_ids = [line.split()[0] for line in
                    result.output.strip().splitlines()]
        assert len(item_ids) == 5

        result = _run("--project", project, "review", "approve", *item_ids)
        assert result.exit_code == 0

        result = _run("--project", project, "train")
        assert "55 examples" in result.output

        result = _run("--project", project, "review", "list")
        assert "no pending items" in result.output

    def test_reject(self, tmp_path):
        project = str(tmp_path / "proj")
        _run("--project", project, "init")
        _run("--project", project, "--fixtures", FIXTURES_PATH,
             "gen", "utterances", "--intent", "pay_bill", "-n", "5")
        listing = _run("--project", project, "review", "list")
        item_id = listing.output.split()[0]
        result = _run("--project", project, "review", "reject", item_id)
        assert result.exit_code == 0
        assert "55" not in _run("--project", project, "train").output

    def test_gen_synonyms_fixture(self, tmp_path):
        project = tmp_path / "proj"
        _run("--project", str(project), "init")
        # strip the bundled synonyms so the generated ones are new
        doc = yaml.safe_load((project / "entities.yaml").read_text())
        for entity in doc["entities"]:
            if entity["name"] == "financial_status":
                entity["values"] = [{"value": "insolvent", "synonyms": []}]
        (project / "entities.yaml").write_text(yaml.safe_dump(doc))
        result = _run("--project", str(project), "--fixtures", FIXTURES_PATH,
                      "gen", "synonyms", "--entity", "financial_status",
                      "--canonical", "insolvent")
        assert result.exit_code == 0, result.output
        assert result.output.count("staged synonym") == 13

    def test_gen_without_fixture_fails_cleanly(self, tmp_path):
        project = str(tmp_path / "proj")
        _run("--project", project, "init")
        result = _run("--project", project, "--fixtures", FIXTURES_PATH,
                      "gen", "intents", "--domain", "insurance", "-n", "3")
        assert result.exit_code == 1
        assert "error" in result.output
