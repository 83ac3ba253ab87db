"""Per-turn orchestration: NLU -> dialog policy -> boosters -> NLG.

One Engine serves many sessions; all conversational state lives in the
DialogState passed in, so sessions can run concurrently as long as each
session's turns are processed serially.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from . import boosters, dialog, nlg, nlu
from .dialog import (
    Action,
    AskSlot,
    CompleteForm,
    DialogState,
    Handoff,
    InvokeBooster,
    Respond,
    ResumeFrame,
    TurnRecord,
)
from .errors import EmptyUtterance, ProviderError
from .gateway import Gateway
from .nlu import IntentModel, IntentPrediction
from .project import ProjectConfig

FALLBACK_TEMPLATE = "fallback_apology"
HANDOFF_TEMPLATE = "direct_to_agent"

AFFIRM_WORDS = {
    "yes", "yeah", "yep", "correct", "confirm", "confirmed", "right", "sure",
    "ok", "okay", "affirmative", "proceed", "absolutely",
}
DENY_WORDS = {"no", "nope", "wrong", "incorrect", "abort", "negative"}
ABANDON_PHRASES = {"never mind", "nevermind", "forget it", "stop", "cancel that"}


@dataclass
class TurnResult:
    replies: list[str]
    debug: dict[str, Any] = field(default_factory=dict)


def _prediction_dict(prediction: IntentPrediction) -> dict[str, Any]:
    return {
        "intent": prediction.intent,
        "confidence": prediction.confidence,
        "ranked": [[name, score] for name, score in prediction.ranked],
    }


def _entity_dicts(entities) -> list[dict[str, Any]]:
    return [
        {
            "entity": e.entity, "raw": e.raw, "start": e.start, "end": e.end,
            "value": e.value, "extractor": e.extractor,
        }
        for e in entities
    ]


def _verdict(tokens: list[str]) -> str | None:
    affirm = any(t in AFFIRM_WORDS for t in tokens)
    deny = any(t in DENY_WORDS for t in tokens)
    if affirm and not deny:
        return "affirm"
    if deny:
        return "deny"
    return None


class Engine:
    def __init__(
        self,
        config: ProjectConfig,
        gateway: Gateway,
        model: IntentModel | None = None,
        autocorrect_enabled: bool = True,
        locale: str = "",
        persona: str | None = None,
    ):
        self.config = config
        self.gateway = gateway
        self.model = model if model is not None else nlu.train(config)
        self.autocorrect_enabled = autocorrect_enabled
        self.locale = locale or config.default_locale
        self.persona = persona

    def new_session(self) -> DialogState:
        return dialog.start_session()

    # -- rendering helpers ---------------------------------------------------

    def _render(self, state: DialogState, template_key: str,
                bindings: dict[str, str] | None = None,
                variant_index: int | None = None) -> str:
        if variant_index is not None:
            return nlg.render(self.config, nlg.RenderRequest(
                template_key=template_key, bindings=bindings or {},
                locale=self.locale, persona=self.persona,
                variant_index=variant_index,
            ))
        return nlg.render_rotated(
            self.config, state, template_key, bindings,
            locale=self.locale, persona=self.persona,
        )

    def _ask_slot(self, state: DialogState, form_name: str, slot_name: str,
                  replies: list[str], template_keys: list[str]) -> None:
        frame = next((f for f in state.frames if f.form == form_name), None)
        replies.append(nlg.render_slot_prompt(
            self.config, form_name, slot_name, frame,
            locale=self.locale, persona=self.persona,
        ))
        form = self.config.form(form_name)
        slot = next((s for s in form.slots if s.name == slot_name), None)
        if slot is not None:
            template_keys.append(slot.prompt_template)

    def _reanchor(self, state: DialogState, replies: list[str],
                  template_keys: list[str]) -> None:
        """After a handled digression, repeat the pending slot question or the
        pending confirmation so the conversation stays on task."""
        if state.frames:
            top = state.frames[-1]
            if top.pending:
                self._ask_slot(state, top.form, top.pending[0], replies, template_keys)
        elif state.awaiting_confirmation:
            gate = dialog.confirmation_gate(self.config, state)
            if gate is not None:
                replies.append(self._render(state, gate.template, gate.bindings))
                template_keys.append(gate.template)

    # -- the turn ------------------------------------------------------------

    def handle_turn(self, state: DialogState, text: str) -> TurnResult:
        tokens = nlu.normalize(text)
        if not tokens:
            raise EmptyUtterance("empty message")

        replies: list[str] = []
        template_keys: list[str] = []
        activations: list[boosters.BoosterActivation] = []
        thresholds = self.config.thresholds

        # pending combined confirmation: affirm executes, deny reopens,
        # anything else is handled normally and then re-anchored
        if state.awaiting_confirmation:
            verdict = _verdict(tokens)
            if verdict is not None:
                actions = dialog.resolve_confirmation(
                    self.config, state, verdict == "affirm"
                )
                for action in actions:
                    if isinstance(action, Respond):
                        replies.append(self._render(state, action.template, action.bindings))
                        template_keys.append(action.template)
                    elif isinstance(action, AskSlot):
                        self._ask_slot(state, action.form, action.slot,
                                       replies, template_keys)
                if not replies:
                    replies.append(self._render(state, FALLBACK_TEMPLATE,
                                                variant_index=0))
                self._record(state, text, replies, None, [], activations,
                             template_keys)
                return TurnResult(replies=replies, debug=self._debug(
                    state, None, [], activations, template_keys))

        # explicit abandon of the active task: pop one frame
        lowered = " ".join(tokens)
        if state.frames and lowered in ABANDON_PHRASES:
            state.frames.pop()
            actions: list[Action] = []
            if state.frames:
                top = state.frames[-1]
                form = self.config.form(top.form)
                if form and form.resume_template:
                    replies.append(self._render(state, form.resume_template,
                                                dict(top.filled)))
                    template_keys.append(form.resume_template)
                if top.pending:
                    self._ask_slot(state, top.form, top.pending[0],
                                   replies, template_keys)
            if not replies:
                replies.append(self._render(state, "task_abandoned"))
                template_keys.append("task_abandoned")
            state.fallback_count = 0
            self._record(state, text, replies, None, [], activations, template_keys)
            return TurnResult(replies=replies, debug=self._debug(
                state, None, [], activations, template_keys))

        # classification, narrowed when a disambiguation question is pending
        allowed = (
            set(state.pending_disambiguation)
            if state.pending_disambiguation else None
        )
        state.pending_disambiguation = None
        prediction = nlu.classify(self.model, text, thresholds.tau_oos, allowed)
        entities = nlu.extract_entities(self.config, text)
        used_text = text

        # auto-correct gate: only on low confidence, never allowed to hurt
        if (
            self.autocorrect_enabled
            and allowed is None
            and prediction.confidence < thresholds.tau_intent
        ):
            try:
                corrected = boosters.autocorrect(self.gateway, text)
                corrected_prediction = nlu.classify(
                    self.model, corrected, thresholds.tau_oos
                )
                if corrected_prediction.confidence > prediction.confidence:
                    activations.append(boosters.BoosterActivation(
                        "autocorrect", text, corrected, "passed"))
                    prediction = corrected_prediction
                    entities = nlu.extract_entities(self.config, corrected)
                    used_text = corrected
                else:
                    activations.append(boosters.BoosterActivation(
                        "autocorrect", text, corrected, "rejected"))
            except ProviderError:
                pass
            except EmptyUtterance:
                pass

        ladder_template = self.config.template(FALLBACK_TEMPLATE)
        ladder_size = (
            len(ladder_template.variants[0].texts) if ladder_template else 1
        )
        ladder_index = dialog.fallback_variant_index(state, ladder_size)

        actions = dialog.step(self.config, state, prediction, entities, used_text)

        handoff_pending = False
        booster_failed = False
        for action in actions:
            if isinstance(action, AskSlot):
                self._ask_slot(state, action.form, action.slot, replies, template_keys)
            elif isinstance(action, CompleteForm):
                form = self.config.form(action.form)
                if form and not form.confirm_required and form.completion_template:
                    replies.append(self._render(
                        state, form.completion_template, action.filled))
                    template_keys.append(form.completion_template)
            elif isinstance(action, ResumeFrame):
                form = self.config.form(action.form)
                frame = next(
                    (f for f in state.frames if f.form == action.form), None)
                if form and form.resume_template:
                    replies.append(self._render(
                        state, form.resume_template,
                        dict(frame.filled) if frame else {}))
                    template_keys.append(form.resume_template)
            elif isinstance(action, Respond):
                replies.append(self._render(state, action.template, action.bindings))
                template_keys.append(action.template)
            elif isinstance(action, InvokeBooster):
                if action.kind == "out_of_scope":
                    try:
                        answer, activation = boosters.answer_out_of_scope(
                            self.gateway, action.payload["text"],
                            self.config.closed_qa,
                        )
                        replies.append(answer)
                        activations.append(activation)
                        state.fallback_count = 0  # booster handled the turn
                        self._reanchor(state, replies, template_keys)
                    except ProviderError:
                        booster_failed = True
                        replies.append(self._render(
                            state, FALLBACK_TEMPLATE, variant_index=ladder_index))
                        template_keys.append(FALLBACK_TEMPLATE)
                        activations.append(boosters.BoosterActivation(
                            "out_of_scope", action.payload["text"], "", "rejected"))
                elif action.kind == "disambiguation":
                    candidates = action.payload["candidates"]
                    question, activation = boosters.disambiguate(
                        self.gateway, action.payload["text"], candidates)
                    state.pending_disambiguation = list(candidates)
                    replies.append(question)
                    activations.append(activation)
            elif isinstance(action, Handoff):
                handoff_pending = True

        if handoff_pending and booster_failed:
            replies.append(self._render(state, HANDOFF_TEMPLATE))
            template_keys.append(HANDOFF_TEMPLATE)

        if not replies:
            # policy produced nothing renderable; never answer with silence
            replies.append(self._render(state, FALLBACK_TEMPLATE,
                                        variant_index=ladder_index))
            template_keys.append(FALLBACK_TEMPLATE)

        self._record(state, text, replies, prediction, entities, activations,
                     template_keys)
        return TurnResult(replies=replies, debug=self._debug(
            state, prediction, entities, activations, template_keys))

    # -- bookkeeping ---------------------------------------------------------

    def _record(self, state, text, replies, prediction, entities, activations,
                template_keys) -> None:
        state.transcript.append(TurnRecord(
            speaker="user", text=text,
            annotations={
                "prediction": _prediction_dict(prediction) if prediction else None,
                "entities": _entity_dicts(entities),
                "boosters": [a.to_dict() for a in activations],
                "templates": template_keys,
            },
        ))
        for reply in replies:
            state.transcript.append(TurnRecord(speaker="bot", text=reply))

    def _debug(self, state, prediction, entities, activations,
               template_keys) -> dict[str, Any]:
        return {
            "intent": _prediction_dict(prediction) if prediction else None,
            "entities": _entity_dicts(entities),
            "frames": [
                {"form": f.form, "filled": dict(f.filled), "pending": list(f.pending)}
                for f in state.frames
            ],
            "boosters": [a.to_dict() for a in activations],
            "templates": template_keys,
            "fallback_count": state.fallback_count,
            "awaiting_confirmation": state.awaiting_confirmation,
        }
