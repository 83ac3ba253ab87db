"""Domain project definition: intents, entities, forms, templates, persona, policies.

Everything here is authored a priori and immutable at runtime; mutation happens
by building a new config and swapping it in.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field

PROVENANCES = ("human", "generated", "approved", "rejected")
USABLE_PROVENANCES = ("human", "approved")
ENTITY_KINDS = ("pattern", "gazetteer")

IDENTIFIER_RE = re.compile(r"^[a-z][a-z0-9_]*$")
# {name} placeholders; literal braces are doubled.
PLACEHOLDER_RE = re.compile(r"(?<!\{)\{([a-z_][a-z0-9_]*)\}(?!\})")


def extract_placeholders(text: str) -> set[str]:
    return set(PLACEHOLDER_RE.findall(text))


@dataclass
class TrainingExample:
    text: str
    locale: str = "en"
    provenance: str = "human"


@dataclass
class IntentDef:
    name: str
    examples: list[TrainingExample] = field(default_factory=list)
    response_template: str | None = None

    def usable_examples(self) -> list[TrainingExample]:
        return [e for e in self.examples if e.provenance in USABLE_PROVENANCES]


@dataclass
class EntityDef:
    name: str
    kind: str  # pattern | gazetteer
    pattern: str | None = None
    # gazetteer: canonical value -> synonyms
    values: list[tuple[str, list[str]]] = field(default_factory=list)
    # optional built-in value normalizer for pattern matches (e.g. "amount")
    normalizer: str | None = None


@dataclass
class SlotDef:
    name: str
    entity_type: str
    prompt_template: str
    required: bool = True


@dataclass
class FormDef:
    name: str
    trigger_intent: str
    slots: list[SlotDef] = field(default_factory=list)
    completion_template: str = ""
    resume_template: str = ""
    confirm_required: bool = False

    def required_slots(self) -> list[SlotDef]:
        return [s for s in self.slots if s.required]


@dataclass
class TemplateVariant:
    locale: str
    persona: str = "default"
    texts: list[str] = field(default_factory=list)


@dataclass
class ResponseTemplate:
    key: str
    variants: list[TemplateVariant] = field(default_factory=list)

    def placeholders(self) -> set[str]:
        names: set[str] = set()
        for variant in self.variants:
            for text in variant.texts:
                names |= extract_placeholders(text)
        return names


@dataclass
class PersonaDef:
    role_description: str = ""
    traits: list[str] = field(default_factory=list)
    style_tags: list[str] = field(default_factory=list)


@dataclass
class ClosedQAPolicy:
    answers: list[str] = field(default_factory=list)
    default_answer: str = ""
    prompt_template: str = "closed_qa"


@dataclass
class ThresholdConfig:
    tau_intent: float = 0.55
    tau_oos: float = 0.35
    max_fallbacks_before_handoff: int = 3


@dataclass
class ProjectConfig:
    name: str
    locales: list[str] = field(default_factory=lambda: ["en"])
    intents: list[IntentDef] = field(default_factory=list)
    entities: list[EntityDef] = field(default_factory=list)
    forms: list[FormDef] = field(default_factory=list)
    templates: list[ResponseTemplate] = field(default_factory=list)
    persona: PersonaDef = field(default_factory=PersonaDef)
    closed_qa: ClosedQAPolicy = field(default_factory=ClosedQAPolicy)
    thresholds: ThresholdConfig = field(default_factory=ThresholdConfig)
    max_frame_depth: int = 4

    @property
    def default_locale(self) -> str:
        return self.locales[0]

    def intent(self, name: str) -> IntentDef | None:
        return next((i for i in self.intents if i.name == name), None)

    def entity(self, name: str) -> EntityDef | None:
        return next((e for e in self.entities if e.name == name), None)

    def form(self, name: str) -> FormDef | None:
        return next((f for f in self.forms if f.name == name), None)

    def form_for_intent(self, intent: str) -> FormDef | None:
        return next((f for f in self.forms if f.trigger_intent == intent), None)

    def template(self, key: str) -> ResponseTemplate | None:
        return next((t for t in self.templates if t.key == key), None)


def _normalize_answer(text: str) -> str:
    return re.sub(r"\s+", " ", unicodedata.normalize("NFC", text)).strip()


def validate(config: ProjectConfig) -> list[str]:
    """Check every project invariant; returns all violations, never raises."""
    violations: list[str] = []

    if not config.locales:
        violations.append("project: at least one locale required")
    if not config.intents:
        violations.append("project: at least one intent required")

    seen_intents: set[str] = set()
    for intent in config.intents:
        if not IDENTIFIER_RE.match(intent.name or ""):
            violations.append(f"intent '{intent.name}': name must be lowercase snake_case")
        if intent.name in seen_intents:
            violations.append(f"intent '{intent.name}': duplicate name")
        seen_intents.add(intent.name)
        for example in intent.examples:
            if not example.text.strip():
                violations.append(f"intent '{intent.name}': empty example text")
            if example.provenance not in PROVENANCES:
                violations.append(
                    f"intent '{intent.name}': unknown provenance '{example.provenance}'"
                )
        if not intent.usable_examples():
            violations.append(
                f"intent '{intent.name}': untrainable - no example with provenance "
                "human or approved"
            )
        if intent.response_template and config.template(intent.response_template) is None:
            violations.append(
                f"intent '{intent.name}': unknown response template "
                f"'{intent.response_template}'"
            )

    entity_names: set[str] = set()
    for entity in config.entities:
        if entity.name in entity_names:
            violations.append(f"entity '{entity.name}': duplicate name")
        entity_names.add(entity.name)
        if entity.kind not in ENTITY_KINDS:
            violations.append(f"entity '{entity.name}': unknown kind '{entity.kind}'")
        elif entity.kind == "pattern":
            if not entity.pattern:
                violations.append(f"entity '{entity.name}': pattern kind needs a pattern")
            else:
                try:
                    re.compile(entity.pattern)
                except re.error as exc:
                    violations.append(f"entity '{entity.name}': bad pattern ({exc})")
        else:
            canonicals: set[str] = set()
            synonym_owner: dict[str, str] = {}
            for canonical, synonyms in entity.values:
                if canonical.lower() in canonicals:
                    violations.append(
                        f"entity '{entity.name}': duplicate canonical value '{canonical}'"
                    )
                canonicals.add(canonical.lower())
                for synonym in synonyms:
                    low = synonym.lower()
                    if low in synonym_owner and synonym_owner[low] != canonical:
                        violations.append(
                            f"entity '{entity.name}': synonym '{synonym}' maps to both "
                            f"'{synonym_owner[low]}' and '{canonical}'"
                        )
                    synonym_owner[low] = canonical

    template_keys = {t.key for t in config.templates}
    for template in config.templates:
        if not template.variants:
            violations.append(f"template '{template.key}': no variants")
        for variant in template.variants:
            if not variant.texts or any(not t.strip() for t in variant.texts):
                violations.append(
                    f"template '{template.key}' ({variant.locale}/{variant.persona}): "
                    "empty variant text"
                )
            if config.locales and variant.locale not in config.locales:
                violations.append(
                    f"template '{template.key}': variant locale '{variant.locale}' "
                    "not declared in project locales"
                )
        if not any(
            v.locale == config.default_locale and v.persona == "default"
            for v in template.variants
        ):
            violations.append(
                f"template '{template.key}': missing default-locale variant "
                f"({config.default_locale})"
            )

    form_names: set[str] = set()
    for form in config.forms:
        if form.name in form_names:
            violations.append(f"form '{form.name}': duplicate name")
        form_names.add(form.name)
        if form.trigger_intent not in seen_intents:
            violations.append(
                f"form '{form.name}': trigger intent '{form.trigger_intent}' not defined"
            )
        if not form.slots:
            violations.append(f"form '{form.name}': needs at least one slot")
        slot_names: set[str] = set()
        for slot in form.slots:
            if slot.name in slot_names:
                violations.append(f"form '{form.name}': duplicate slot '{slot.name}'")
            slot_names.add(slot.name)
            if slot.entity_type not in entity_names:
                violations.append(
                    f"form '{form.name}' slot '{slot.name}': unknown entity type "
                    f"'{slot.entity_type}'"
                )
            if slot.prompt_template not in template_keys:
                violations.append(
                    f"form '{form.name}' slot '{slot.name}': unknown prompt template "
                    f"'{slot.prompt_template}'"
                )
        for attr in ("completion_template", "resume_template"):
            key = getattr(form, attr)
            if key and key not in template_keys:
                violations.append(f"form '{form.name}': unknown {attr} '{key}'")

    qa = config.closed_qa
    if qa.answers:
        normalized = [_normalize_answer(a) for a in qa.answers]
        if any(not n for n in normalized):
            violations.append("closed_qa: empty answer")
        if len(set(normalized)) != len(normalized):
            violations.append("closed_qa: answers not pairwise distinct")
        if _normalize_answer(qa.default_answer) in normalized:
            violations.append("closed_qa: default answer duplicates an allowed answer")
        if not qa.default_answer.strip():
            violations.append("closed_qa: default answer required")

    th = config.thresholds
    if not (0 <= th.tau_oos < th.tau_intent <= 1):
        violations.append(
            f"thresholds: need 0 <= tau_oos < tau_intent <= 1, got "
            f"tau_oos={th.tau_oos} tau_intent={th.tau_intent}"
        )
    if th.max_fallbacks_before_handoff < 1:
        violations.append("thresholds: max_fallbacks_before_handoff must be >= 1")
    if config.max_frame_depth < 1:
        violations.append("project: max_frame_depth must be >= 1")

    return violations
