"""NLG stage: template rendering with locale/persona variants.

Fallback (apology ladder) templates are indexed by the dialog manager's
consecutive-failure count; everything else rotates round-robin per session so
responses do not repeat verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .dialog import ContextFrame, DialogState
from .errors import MissingBinding, UnknownTemplate
from .project import PLACEHOLDER_RE, ProjectConfig, ResponseTemplate, TemplateVariant


@dataclass
class RenderRequest:
    template_key: str
    bindings: dict[str, str] = field(default_factory=dict)
    locale: str = ""
    persona: str | None = None
    variant_index: int | None = None


def _select_variant(
    config: ProjectConfig, template: ResponseTemplate, locale: str, persona: str | None
) -> TemplateVariant:
    persona_tag = persona or "default"
    tries = [
        (locale, persona_tag),
        (locale, "default"),
        (config.default_locale, persona_tag),
        (config.default_locale, "default"),
    ]
    for want_locale, want_persona in tries:
        for variant in template.variants:
            if variant.locale == want_locale and variant.persona == want_persona:
                return variant
    # project validation guarantees the default/default variant exists
    return template.variants[0]


def substitute(text: str, bindings: dict[str, str]) -> str:
    def repl(match):
        name = match.group(1)
        if name not in bindings:
            raise MissingBinding(name)
        return str(bindings[name])

    out = PLACEHOLDER_RE.sub(repl, text)
    return out.replace("{{", "{").replace("}}", "}")


def render(config: ProjectConfig, request: RenderRequest) -> str:
    template = config.template(request.template_key)
    if template is None:
        raise UnknownTemplate(request.template_key)
    variant = _select_variant(
        config, template, request.locale or config.default_locale, request.persona
    )
    index = request.variant_index if request.variant_index is not None else 0
    index = max(0, min(index, len(variant.texts) - 1))
    return substitute(variant.texts[index], request.bindings)


def render_rotated(
    config: ProjectConfig,
    state: DialogState,
    template_key: str,
    bindings: dict[str, str] | None = None,
    locale: str = "",
    persona: str | None = None,
) -> str:
    """Round-robin variant selection with a per-session counter."""
    template = config.template(template_key)
    if template is None:
        raise UnknownTemplate(template_key)
    variant = _select_variant(config, template, locale or config.default_locale, persona)
    counter = state.rotation.get(template_key, 0)
    state.rotation[template_key] = counter + 1
    index = counter % len(variant.texts)
    return substitute(variant.texts[index], bindings or {})


def render_slot_prompt(
    config: ProjectConfig,
    form_name: str,
    slot_name: str,
    frame: ContextFrame | None = None,
    locale: str = "",
    persona: str | None = None,
) -> str:
    """Prompt for a pending slot; already-filled slot values are available as
    bindings."""
    form = config.form(form_name)
    slot = None
    if form is not None:
        slot = next((s for s in form.slots if s.name == slot_name), None)
    if form is None or slot is None:
        raise UnknownTemplate(f"{form_name}.{slot_name}")
    bindings = dict(frame.filled) if frame is not None else {}
    return render(config, RenderRequest(
        template_key=slot.prompt_template, bindings=bindings,
        locale=locale, persona=persona,
    ))
