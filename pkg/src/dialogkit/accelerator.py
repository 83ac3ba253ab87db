"""Design-time generation commands feeding a staging-and-approval workflow.

Nothing generated here ever reaches the trained model without an explicit
approve: generated utterances are staged, and the NLU trainer only consumes
human/approved provenance.
"""

from __future__ import annotations

import re
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .errors import (
    AlreadyDecided,
    EmptyList,
    UnknownItem,
    ValidationError,
    WrongEntityKind,
)
from .gateway import Gateway, parse_numbered_list
from .project import (
    EntityDef,
    IntentDef,
    ProjectConfig,
    TemplateVariant,
    TrainingExample,
    save_project,
    validate,
)
from .project.store import atomic_write

STAGING_FILE = "staging.yaml"

KINDS = ("intent", "utterance", "entity", "synonym", "persona_trait",
         "template_localization")

LOCALE_LANGUAGES = {
    "en": "English",
    "de": "German",
    "de-CH-x-dialect": "Swiss German",
    "es": "Spanish",
    "fr": "French",
    "it": "Italian",
}


@dataclass
class StagedItem:
    id: str
    kind: str
    target: dict[str, str]
    content: str
    created_at: float
    status: str = "pending"  # pending | approved | rejected
    exchange_id: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id, "kind": self.kind, "target": self.target,
            "content": self.content, "created_at": self.created_at,
            "status": self.status, "exchange_id": self.exchange_id,
        }


class StagingStore:
    """staging.yaml in the project directory; append/update, never delete
    (rejected items are kept for audit)."""

    def __init__(self, project_dir: str | Path):
        self.path = Path(project_dir) / STAGING_FILE
        self.items: list[StagedItem] = []
        if self.path.is_file():
            with open(self.path, encoding="utf-8") as fh:
                doc = yaml.safe_load(fh) or {}
            for raw in doc.get("items", []):
                self.items.append(StagedItem(
                    id=raw["id"], kind=raw["kind"], target=dict(raw["target"]),
                    content=raw["content"], created_at=raw.get("created_at", 0.0),
                    status=raw.get("status", "pending"),
                    exchange_id=raw.get("exchange_id", ""),
                ))

    def save(self) -> None:
        atomic_write(self.path, yaml.safe_dump(
            {"items": [item.to_dict() for item in self.items]},
            allow_unicode=True, sort_keys=False,
        ))

    def pending(self) -> list[StagedItem]:
        return [i for i in self.items if i.status == "pending"]

    def get(self, item_id: str) -> StagedItem:
        for item in self.items:
            if item.id == item_id:
                return item
        raise UnknownItem(item_id)

    def _duplicate(self, kind: str, target: dict[str, str], content: str) -> bool:
        return any(
            i.kind == kind and i.target == target and i.content == content
            and i.status in ("pending", "approved")
            for i in self.items
        )

    def stage(self, kind: str, target: dict[str, str], content: str,
              exchange_id: str = "") -> StagedItem | None:
        """Stage one item; duplicates (same kind/target/content, not rejected)
        are dropped so re-runs are idempotent."""
        if self._duplicate(kind, target, content):
            return None
        item = StagedItem(
            id=uuid.uuid4().hex[:12], kind=kind, target=target, content=content,
            created_at=time.time(), exchange_id=exchange_id,
        )
        self.items.append(item)
        return item


def slugify(text: str) -> str:
    slug = re.sub(r"[^a-z0-9]+", "_", text.strip().lower()).strip("_")
    return slug


def _last_exchange_id(gateway: Gateway) -> str:
    entries = gateway.audit_log.entries
    return entries[-1].exchange_id if entries else ""


def gen_intents(config: ProjectConfig, gateway: Gateway, staging: StagingStore,
                domain: str, n: int) -> list[StagedItem]:
    if n < 1:
        raise ValueError("n must be >= 1")
    raw = gateway.complete("gen_intents", {"domain": domain, "n": str(n)})
    names = [slugify(item) for item in parse_numbered_list(raw)[:n]]
    exchange_id = _last_exchange_id(gateway)
    existing = {i.name for i in config.intents}
    staged = []
    for name in names:
        if not name or name in existing:
            continue
        item = staging.stage("intent", {}, name, exchange_id)
        if item is not None:
            staged.append(item)
    staging.save()
    return staged


def gen_utterances(config: ProjectConfig, gateway: Gateway, staging: StagingStore,
                   intent_name: str, n: int, constraints: str = "",
                   description: str = "") -> list[StagedItem]:
    intent = config.intent(intent_name)
    if intent is None:
        raise UnknownItem(f"intent '{intent_name}'")
    if n < 1:
        raise ValueError("n must be >= 1")
    raw = gateway.complete("gen_utterances", {
        "n": str(n),
        "intent": intent_name,
        "description": description or intent_name.replace("_", " "),
        "constraints": constraints,
    })
    texts = parse_numbered_list(raw)[:n]
    exchange_id = _last_exchange_id(gateway)
    staged = []
    for text in texts:
        item = staging.stage("utterance", {"intent": intent_name}, text, exchange_id)
        if item is not None:
            staged.append(item)
    staging.save()
    return staged


def gen_entities(config: ProjectConfig, gateway: Gateway, staging: StagingStore,
                 domain: str) -> list[StagedItem]:
    raw = gateway.complete("gen_entities", {"domain": domain})
    names = parse_numbered_list(raw)
    exchange_id = _last_exchange_id(gateway)
    existing = {e.name.rstrip("s") for e in config.entities}
    staged = []
    for name in names:
        if slugify(name).rstrip("s") in existing:
            continue
        item = staging.stage("entity", {}, name, exchange_id)
        if item is not None:
            staged.append(item)
    staging.save()
    return staged


def gen_synonyms(config: ProjectConfig, gateway: Gateway, staging: StagingStore,
                 entity_name: str, canonical: str,
                 domain: str = "private banking") -> tuple[list[StagedItem], list[str]]:
    """Returns (staged items, withheld terms that collide with another
    canonical value)."""
    entity = config.entity(entity_name)
    if entity is None or entity.kind != "gazetteer":
        raise WrongEntityKind(f"'{entity_name}' is not a gazetteer entity")
    raw = gateway.complete("gen_synonyms", {"domain": domain, "term": canonical})
    terms = [t.strip().rstrip(".") for t in raw.split(",")]
    terms = [t for t in terms if t]
    if not terms:
        raise EmptyList("synonym response contained no terms")
    exchange_id = _last_exchange_id(gateway)

    own_existing = {canonical.lower()}
    other_surfaces: set[str] = set()
    for value, synonyms in entity.values:
        surfaces = {value.lower(), *(s.lower() for s in synonyms)}
        if value.lower() == canonical.lower():
            own_existing |= surfaces
        else:
            other_surfaces |= surfaces

    staged, withheld = [], []
    for term in terms:
        low = term.lower()
        if low in own_existing:
            continue
        if low in other_surfaces:
            withheld.append(term)
            continue
        item = staging.stage(
            "synonym", {"entity": entity_name, "canonical": canonical},
            term, exchange_id,
        )
        if item is not None:
            staged.append(item)
    staging.save()
    return staged, withheld


_TRAIT_MARKERS = re.compile(
    r".*\b(?:possesses|possess|maintain|maintains|practice|practise|"
    r"demonstrate|demonstrates|build|excel at|adept at|staying)\b",
)


def extract_traits(description: str) -> list[str]:
    """Pull trait phrases out of a prose persona description."""
    traits = []
    for chunk in re.split(r"[.,;]", description):
        chunk = _TRAIT_MARKERS.sub("", chunk).strip()
        chunk = re.sub(r"^(?:and|also|they|a|an)\s+", "", chunk, flags=re.I).strip()
        if len(chunk.split()) >= 2 and len(chunk) < 80:
            traits.append(chunk)
    return traits


def gen_persona(config: ProjectConfig, gateway: Gateway, staging: StagingStore,
                role: str) -> list[StagedItem]:
    if not role.strip():
        raise ValueError("role description must be non-empty")
    raw = gateway.complete("gen_persona", {"role": role})
    exchange_id = _last_exchange_id(gateway)
    existing = {t.lower() for t in config.persona.traits}
    staged = []
    for trait in extract_traits(raw):
        if trait.lower() in existing:
            continue
        item = staging.stage("persona_trait", {}, trait, exchange_id)
        if item is not None:
            staged.append(item)
    staging.save()
    return staged


def localize(config: ProjectConfig, gateway: Gateway, staging: StagingStore,
             template_keys: list[str], locales: list[str]) -> list[StagedItem]:
    for key in template_keys:
        if config.template(key) is None:
            raise UnknownItem(f"template '{key}'")
    for locale in locales:
        if locale not in config.locales:
            raise ValueError(f"locale '{locale}' not declared in project")
    staged = []
    for key in template_keys:
        template = config.template(key)
        source = next(
            v for v in template.variants
            if v.locale == config.default_locale and v.persona == "default"
        )
        for locale in locales:
            language = LOCALE_LANGUAGES.get(locale, locale)
            translated = gateway.complete("localize", {
                "language": language, "statement": source.texts[0],
            })
            item = staging.stage(
                "template_localization", {"template": key, "locale": locale},
                translated, _last_exchange_id(gateway),
            )
            if item is not None:
                staged.append(item)
    staging.save()
    return staged


def _merge(config: ProjectConfig, item: StagedItem) -> None:
    if item.kind == "utterance":
        intent = config.intent(item.target["intent"])
        if intent is None:
            raise UnknownItem(f"intent '{item.target['intent']}'")
        intent.examples.append(TrainingExample(
            text=item.content, locale=config.default_locale, provenance="approved",
        ))
    elif item.kind == "intent":
        # seed the new intent with its own surface form so the project stays
        # trainable; humans refine afterwards
        config.intents.append(IntentDef(
            name=item.content,
            examples=[TrainingExample(
                text=item.content.replace("_", " "),
                locale=config.default_locale, provenance="approved",
            )],
        ))
    elif item.kind == "entity":
        config.entities.append(EntityDef(
            name=slugify(item.content), kind="gazetteer",
            values=[(item.content, [])],
        ))
    elif item.kind == "synonym":
        entity = config.entity(item.target["entity"])
        if entity is None:
            raise UnknownItem(f"entity '{item.target['entity']}'")
        for index, (value, synonyms) in enumerate(entity.values):
            if value.lower() == item.target["canonical"].lower():
                entity.values[index] = (value, [*synonyms, item.content])
                break
        else:
            entity.values.append((item.target["canonical"], [item.content]))
    elif item.kind == "persona_trait":
        config.persona.traits.append(item.content)
    elif item.kind == "template_localization":
        template = config.template(item.target["template"])
        if template is None:
            raise UnknownItem(f"template '{item.target['template']}'")
        locale = item.target["locale"]
        template.variants = [
            v for v in template.variants
            if not (v.locale == locale and v.persona == "default")
        ]
        template.variants.append(TemplateVariant(
            locale=locale, persona="default", texts=[item.content],
        ))
    else:
        raise UnknownItem(f"unknown staged kind '{item.kind}'")


def review_approve(config: ProjectConfig, staging: StagingStore,
                   project_dir: str | Path, item_ids: list[str]) -> ProjectConfig:
    """Merge approved items into the project and persist both files.

    The merged project is re-validated before anything touches disk.
    """
    items = [staging.get(item_id) for item_id in item_ids]
    for item in items:
        if item.status != "pending":
            raise AlreadyDecided(f"{item.id} already {item.status}")
    for item in items:
        _merge(config, item)
    violations = validate(config)
    if violations:
        raise ValidationError(violations)
    for item in items:
        item.status = "approved"
    save_project(config, project_dir)
    staging.save()
    return config


def review_reject(staging: StagingStore, item_ids: list[str]) -> None:
    items = [staging.get(item_id) for item_id in item_ids]
    for item in items:
        if item.status != "pending":
            raise AlreadyDecided(f"{item.id} already {item.status}")
    for item in items:
        item.status = "rejected"
    staging.save()
