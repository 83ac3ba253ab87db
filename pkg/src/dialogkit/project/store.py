"""Load/save a project directory of YAML files.

Layout: project.yaml (manifest) plus intents.yaml, entities.yaml, forms.yaml,
templates.yaml, persona.yaml, closed_qa.yaml. staging.yaml lives alongside but
is owned by the accelerator workflow.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

import yaml

from ..errors import IoError, MissingFile, ParseError, ValidationError
from .model import (
    ClosedQAPolicy,
    EntityDef,
    FormDef,
    IntentDef,
    PersonaDef,
    ProjectConfig,
    ResponseTemplate,
    SlotDef,
    TemplateVariant,
    ThresholdConfig,
    TrainingExample,
    validate,
)

SCHEMA_VERSION = 1
MANIFEST = "project.yaml"


def _read_yaml(path: Path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ParseError(str(path), str(exc)) from exc
    except OSError as exc:
        raise MissingFile(f"cannot read {path}: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ParseError(str(path), "expected a mapping at top level")
    return data


def atomic_write(path: Path, content: str) -> None:
    """Write-temp-then-rename so readers never see a partial file."""
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(content)
        os.replace(tmp, path)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _write_yaml(path: Path, data: dict) -> None:
    atomic_write(path, yaml.safe_dump(data, allow_unicode=True, sort_keys=False))


def load_project(path: str | os.PathLike) -> ProjectConfig:
    """Load and fully validate a project directory.

    Raises MissingFile, ParseError, or ValidationError (with every violation).
    """
    root = Path(path)
    manifest_path = root / MANIFEST
    if not manifest_path.is_file():
        raise MissingFile(f"no {MANIFEST} in {root}")
    manifest = _read_yaml(manifest_path)

    intents_doc = _read_yaml(root / "intents.yaml") if (root / "intents.yaml").is_file() else {}
    entities_doc = _read_yaml(root / "entities.yaml") if (root / "entities.yaml").is_file() else {}
    forms_doc = _read_yaml(root / "forms.yaml") if (root / "forms.yaml").is_file() else {}
    templates_doc = (
        _read_yaml(root / "templates.yaml") if (root / "templates.yaml").is_file() else {}
    )
    persona_doc = _read_yaml(root / "persona.yaml") if (root / "persona.yaml").is_file() else {}
    qa_doc = _read_yaml(root / "closed_qa.yaml") if (root / "closed_qa.yaml").is_file() else {}

    try:
        config = _build_config(manifest, intents_doc, entities_doc, forms_doc,
                               templates_doc, persona_doc, qa_doc)
    except (KeyError, TypeError, AttributeError) as exc:
        raise ParseError(str(root), f"malformed project data: {exc!r}") from exc

    violations = validate(config)
    if violations:
        raise ValidationError(violations)
    return config


def _build_config(manifest, intents_doc, entities_doc, forms_doc,
                  templates_doc, persona_doc, qa_doc) -> ProjectConfig:
    thresholds_doc = manifest.get("thresholds", {})
    thresholds = ThresholdConfig(
        tau_intent=float(thresholds_doc.get("tau_intent", 0.55)),
        tau_oos=float(thresholds_doc.get("tau_oos", 0.35)),
        max_fallbacks_before_handoff=int(
            thresholds_doc.get("max_fallbacks_before_handoff", 3)
        ),
    )

    intents = [
        IntentDef(
            name=i["name"],
            examples=[
                TrainingExample(
                    text=e["text"],
                    locale=e.get("locale", "en"),
                    provenance=e.get("provenance", "human"),
                )
                for e in i.get("examples", [])
            ],
            response_template=i.get("response_template"),
        )
        for i in intents_doc.get("intents", [])
    ]

    entities = [
        EntityDef(
            name=e["name"],
            kind=e["kind"],
            pattern=e.get("pattern"),
            normalizer=e.get("normalizer"),
            values=[
                (v["value"], list(v.get("synonyms", [])))
                for v in e.get("values", [])
            ],
        )
        for e in entities_doc.get("entities", [])
    ]

    forms = [
        FormDef(
            name=f["name"],
            trigger_intent=f["trigger_intent"],
            slots=[
                SlotDef(
                    name=s["name"],
                    entity_type=s["entity_type"],
                    prompt_template=s["prompt_template"],
                    required=bool(s.get("required", True)),
                )
                for s in f.get("slots", [])
            ],
            completion_template=f.get("completion_template", ""),
            resume_template=f.get("resume_template", ""),
            confirm_required=bool(f.get("confirm_required", False)),
        )
        for f in forms_doc.get("forms", [])
    ]

    templates = [
        ResponseTemplate(
            key=t["key"],
            variants=[
                TemplateVariant(
                    locale=v["locale"],
                    persona=v.get("persona", "default"),
                    texts=list(v.get("texts", [])),
                )
                for v in t.get("variants", [])
            ],
        )
        for t in templates_doc.get("templates", [])
    ]

    persona = PersonaDef(
        role_description=persona_doc.get("role_description", ""),
        traits=list(persona_doc.get("traits", [])),
        style_tags=list(persona_doc.get("style_tags", [])),
    )

    closed_qa = ClosedQAPolicy(
        answers=list(qa_doc.get("answers", [])),
        default_answer=qa_doc.get("default_answer", ""),
        prompt_template=qa_doc.get("prompt_template", "closed_qa"),
    )

    return ProjectConfig(
        name=manifest.get("name", "project"),
        locales=list(manifest.get("locales", ["en"])),
        intents=intents,
        entities=entities,
        forms=forms,
        templates=templates,
        persona=persona,
        closed_qa=closed_qa,
        thresholds=thresholds,
        max_frame_depth=int(manifest.get("max_frame_depth", 4)),
    )


def save_project(config: ProjectConfig, path: str | os.PathLike) -> None:
    """Persist a project directory; round-trip safe with load_project."""
    root = Path(path)
    try:
        root.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {root}: {exc}") from exc

    _write_yaml(root / MANIFEST, {
        "schema_version": SCHEMA_VERSION,
        "name": config.name,
        "locales": config.locales,
        "max_frame_depth": config.max_frame_depth,
        "thresholds": {
            "tau_intent": config.thresholds.tau_intent,
            "tau_oos": config.thresholds.tau_oos,
            "max_fallbacks_before_handoff":
                config.thresholds.max_fallbacks_before_handoff,
        },
    })
    _write_yaml(root / "intents.yaml", {
        "intents": [
            {
                "name": i.name,
                **({"response_template": i.response_template}
                   if i.response_template else {}),
                "examples": [
                    {"text": e.text, "locale": e.locale, "provenance": e.provenance}
                    for e in i.examples
                ],
            }
            for i in config.intents
        ],
    })
    _write_yaml(root / "entities.yaml", {
        "entities": [
            {
                "name": e.name,
                "kind": e.kind,
                **({"pattern": e.pattern} if e.kind == "pattern" else {}),
                **({"normalizer": e.normalizer} if e.normalizer else {}),
                **({"values": [
                    {"value": value, "synonyms": synonyms}
                    for value, synonyms in e.values
                ]} if e.kind == "gazetteer" else {}),
            }
            for e in config.entities
        ],
    })
    _write_yaml(root / "forms.yaml", {
        "forms": [
            {
                "name": f.name,
                "trigger_intent": f.trigger_intent,
                "confirm_required": f.confirm_required,
                "completion_template": f.completion_template,
                "resume_template": f.resume_template,
                "slots": [
                    {
                        "name": s.name,
                        "entity_type": s.entity_type,
                        "prompt_template": s.prompt_template,
                        "required": s.required,
                    }
                    for s in f.slots
                ],
            }
            for f in config.forms
        ],
    })
    _write_yaml(root / "templates.yaml", {
        "templates": [
            {
                "key": t.key,
                "variants": [
                    {"locale": v.locale, "persona": v.persona, "texts": v.texts}
                    for v in t.variants
                ],
            }
            for t in config.templates
        ],
    })
    _write_yaml(root / "persona.yaml", {
        "role_description": config.persona.role_description,
        "traits": config.persona.traits,
        "style_tags": config.persona.style_tags,
    })
    _write_yaml(root / "closed_qa.yaml", {
        "answers": config.closed_qa.answers,
        "default_answer": config.closed_qa.default_answer,
        "prompt_template": config.closed_qa.prompt_template,
    })
