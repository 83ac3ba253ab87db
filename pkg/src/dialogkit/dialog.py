"""Dialog management: context-frame stack, slot filling, digression resumption,
fallback escalation, and confirmation gating.

Frames only ever change by push (context switch) or pop (completion). A switch
at max stack depth is refused with a dedicated template instead of pushing.
"""

from __future__ import annotations

import time
import uuid
from dataclasses import dataclass, field
from typing import Any

from .nlu import EntityMatch, IntentPrediction
from .project import FormDef, ProjectConfig

SWITCH_REFUSED_TEMPLATE = "switch_refused"
CONFIRM_TEMPLATE = "confirm_details"


# --- actions ----------------------------------------------------------------

@dataclass
class AskSlot:
    form: str
    slot: str


@dataclass
class CompleteForm:
    form: str
    filled: dict[str, str]


@dataclass
class ResumeFrame:
    form: str


@dataclass
class Respond:
    template: str
    bindings: dict[str, str] = field(default_factory=dict)


@dataclass
class InvokeBooster:
    kind: str  # autocorrect | out_of_scope | disambiguation | rephrase | closed_qa | summarize
    payload: dict[str, Any] = field(default_factory=dict)


@dataclass
class Handoff:
    reason: str


Action = AskSlot | CompleteForm | ResumeFrame | Respond | InvokeBooster | Handoff


# --- state ------------------------------------------------------------------

@dataclass
class ContextFrame:
    form: str
    filled: dict[str, str] = field(default_factory=dict)
    pending: list[str] = field(default_factory=list)


@dataclass
class TurnRecord:
    speaker: str  # user | bot
    text: str
    annotations: dict[str, Any] | None = None


@dataclass
class DialogState:
    session_id: str
    frames: list[ContextFrame] = field(default_factory=list)
    fallback_count: int = 0
    transcript: list[TurnRecord] = field(default_factory=list)
    created_at: float = 0.0
    updated_at: float = 0.0
    # completed confirm_required forms awaiting one combined confirmation
    pending_confirmations: list[tuple[str, dict[str, str]]] = field(default_factory=list)
    awaiting_confirmation: bool = False
    # intents a disambiguation question narrowed the next turn to
    pending_disambiguation: list[str] | None = None
    handed_off: bool = False
    # per-session round-robin counters for template variants
    rotation: dict[str, int] = field(default_factory=dict)


def start_session() -> DialogState:
    now = time.time()
    return DialogState(session_id=uuid.uuid4().hex, created_at=now, updated_at=now)


def fallback_variant_index(state: DialogState, variant_count: int) -> int:
    """Apology-ladder index: consecutive failures walk the ladder, clamped."""
    return min(state.fallback_count, variant_count - 1)


def confirmation_gate(config: ProjectConfig, state: DialogState) -> Respond | None:
    """Combined confirmation once the stack is empty and confirm_required
    forms have completed; their completion actions stay deferred until the
    user affirms."""
    if state.frames or not state.pending_confirmations:
        return None
    parts = []
    for form_name, filled in state.pending_confirmations:
        for slot, value in filled.items():
            parts.append(f"{slot.replace('_', ' ')}: {value}")
    return Respond(CONFIRM_TEMPLATE, {"details": "; ".join(parts)})


# --- policy -----------------------------------------------------------------

def _fill_frame(form: FormDef, frame: ContextFrame, entities: list[EntityMatch]) -> bool:
    """Fill pending slots by entity-type match in slot order; one entity can
    fill at most one slot, one utterance can fill several slots."""
    used: set[int] = set()
    filled_any = False
    for slot in form.slots:
        if slot.name not in frame.pending:
            continue
        for index, match in enumerate(entities):
            if index in used or match.entity != slot.entity_type:
                continue
            frame.filled[slot.name] = match.value
            frame.pending.remove(slot.name)
            used.add(index)
            filled_any = True
            break
    return filled_any


def _push_frame(config: ProjectConfig, state: DialogState, form: FormDef,
                entities: list[EntityMatch], actions: list[Action]) -> None:
    frame = ContextFrame(
        form=form.name,
        pending=[s.name for s in form.required_slots()],
    )
    state.frames.append(frame)
    _fill_frame(form, frame, entities)
    if frame.pending:
        actions.append(AskSlot(form.name, frame.pending[0]))
    else:
        _complete_top(config, state, actions)


def _complete_top(config: ProjectConfig, state: DialogState,
                  actions: list[Action]) -> None:
    frame = state.frames.pop()
    form = config.form(frame.form)
    actions.append(CompleteForm(frame.form, dict(frame.filled)))
    if form is not None and form.confirm_required:
        state.pending_confirmations.append((frame.form, dict(frame.filled)))
    if state.frames:
        top = state.frames[-1]
        actions.append(ResumeFrame(top.form))
        if top.pending:
            actions.append(AskSlot(top.form, top.pending[0]))
        else:
            _complete_top(config, state, actions)
    else:
        gate = confirmation_gate(config, state)
        if gate is not None:
            actions.append(gate)
            state.awaiting_confirmation = True


def step(
    config: ProjectConfig,
    state: DialogState,
    prediction: IntentPrediction,
    entities: list[EntityMatch],
    text: str,
) -> list[Action]:
    """One policy turn. Mutates state, returns the ordered actions."""
    actions: list[Action] = []
    thresholds = config.thresholds
    active = state.frames[-1] if state.frames else None

    confident = prediction.confidence >= thresholds.tau_intent
    in_band = thresholds.tau_oos <= prediction.confidence < thresholds.tau_intent
    band_candidates = [
        name for name, score in prediction.ranked if score >= thresholds.tau_oos
    ]
    # A band score with a single viable candidate resolves without a
    # disambiguation question (also how a narrowed post-disambiguation
    # turn gets accepted).
    accepted_intent = None
    if prediction.intent is not None and (
        confident or (in_band and len(band_candidates) == 1)
    ):
        accepted_intent = prediction.intent
    target_form = config.form_for_intent(accepted_intent) if accepted_intent else None

    handled = False

    if target_form is not None and (active is None or active.form != target_form.name):
        # (a) context switch: push, fill, ask
        if len(state.frames) >= config.max_frame_depth:
            actions.append(Respond(SWITCH_REFUSED_TEMPLATE))
        else:
            _push_frame(config, state, target_form, entities, actions)
        handled = True
    elif active is not None:
        # (b) slot filling on the active frame (incl. same-intent re-trigger)
        form = config.form(active.form)
        filled_any = _fill_frame(form, active, entities)
        retriggered = target_form is not None and active.form == target_form.name
        if filled_any or retriggered:
            handled = True
            if active.pending:
                actions.append(AskSlot(active.form, active.pending[0]))
            else:
                _complete_top(config, state, actions)

    if not handled and accepted_intent is not None and target_form is None:
        # (c) plain intent response; during a form it is a digression that
        # gets answered and then re-anchored to the pending slot
        intent_def = config.intent(accepted_intent)
        template = intent_def.response_template if intent_def else None
        if template:
            actions.append(Respond(template))
            if active is not None and active.pending:
                actions.append(AskSlot(active.form, active.pending[0]))
            handled = True

    if handled:
        state.fallback_count = 0
        state.updated_at = time.time()
        return actions

    if in_band and len(band_candidates) >= 2:
        # (d) ambiguous: ask a disambiguation question
        actions.append(InvokeBooster("disambiguation", {
            "text": text,
            "candidates": band_candidates[:2],
        }))
    else:
        # (e) out of scope
        actions.append(InvokeBooster("out_of_scope", {"text": text}))
        state.fallback_count += 1
        if state.fallback_count >= thresholds.max_fallbacks_before_handoff:
            actions.append(Handoff("repeated breakdown"))
    state.updated_at = time.time()
    return actions


def resolve_confirmation(
    config: ProjectConfig, state: DialogState, affirmed: bool
) -> list[Action]:
    """Apply the user's reply to a pending combined confirmation.

    Affirm releases the deferred completion responses; deny reopens every
    confirmed form with all slots pending again.
    """
    actions: list[Action] = []
    state.awaiting_confirmation = False
    pending = state.pending_confirmations
    state.pending_confirmations = []
    if affirmed:
        for form_name, filled in pending:
            form = config.form(form_name)
            if form is not None and form.completion_template:
                actions.append(Respond(form.completion_template, dict(filled)))
        state.fallback_count = 0
    else:
        for form_name, _ in pending:
            form = config.form(form_name)
            if form is None:
                continue
            state.frames.append(ContextFrame(
                form=form_name,
                pending=[s.name for s in form.required_slots()],
            ))
        if state.frames and state.frames[-1].pending:
            top = state.frames[-1]
            actions.append(AskSlot(top.form, top.pending[0]))
    state.updated_at = time.time()
    return actions


# --- (de)serialization ------------------------------------------------------

def state_to_dict(state: DialogState) -> dict[str, Any]:
    return {
        "session_id": state.session_id,
        "frames": [
            {"form": f.form, "filled": f.filled, "pending": f.pending}
            for f in state.frames
        ],
        "fallback_count": state.fallback_count,
        "transcript": [
            {"speaker": t.speaker, "text": t.text, "annotations": t.annotations}
            for t in state.transcript
        ],
        "created_at": state.created_at,
        "updated_at": state.updated_at,
        "pending_confirmations": [
            {"form": name, "filled": filled}
            for name, filled in state.pending_confirmations
        ],
        "awaiting_confirmation": state.awaiting_confirmation,
        "pending_disambiguation": state.pending_disambiguation,
        "handed_off": state.handed_off,
        "rotation": state.rotation,
    }


def state_from_dict(data: dict[str, Any]) -> DialogState:
    return DialogState(
        session_id=data["session_id"],
        frames=[
            ContextFrame(form=f["form"], filled=dict(f["filled"]),
                         pending=list(f["pending"]))
            for f in data.get("frames", [])
        ],
        fallback_count=data.get("fallback_count", 0),
        transcript=[
            TurnRecord(speaker=t["speaker"], text=t["text"],
                       annotations=t.get("annotations"))
            for t in data.get("transcript", [])
        ],
        created_at=data.get("created_at", 0.0),
        updated_at=data.get("updated_at", 0.0),
        pending_confirmations=[
            (p["form"], dict(p["filled"]))
            for p in data.get("pending_confirmations", [])
        ],
        awaiting_confirmation=data.get("awaiting_confirmation", False),
        pending_disambiguation=data.get("pending_disambiguation"),
        handed_off=data.get("handed_off", False),
        rotation=dict(data.get("rotation", {})),
    )
