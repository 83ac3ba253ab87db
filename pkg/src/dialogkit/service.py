"""HTTP API over the engine.

Session state is persisted as append-only JSONL event files in the data
directory, one file per session; every mutation is flushed to disk before the
response is returned, so a restarted server resumes mid-conversation.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Any

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from . import boosters, dialog
from .dialog import DialogState
from .engine import Engine
from .errors import EmptyUtterance, FormatParseError, ProviderError


class MessageRequest(BaseModel):
    text: str


class MessageResponse(BaseModel):
    replies: list[str]
    debug: dict[str, Any]


class SessionResponse(BaseModel):
    session_id: str


class TranscriptResponse(BaseModel):
    session_id: str
    handed_off: bool
    turns: list[dict[str, Any]]


class HandoffResponse(BaseModel):
    session_id: str
    action_required: str
    summary: str


class SessionStore:
    """In-memory sessions with JSONL event persistence and per-session locks."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, DialogState] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        self._load_all()

    def _session_path(self, session_id: str) -> Path:
        return self.data_dir / f"session-{session_id}.jsonl"

    def _load_all(self) -> None:
        for path in sorted(self.data_dir.glob("session-*.jsonl")):
            state = None
            with open(path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    event = json.loads(line)
                    if event.get("type") == "state":
                        state = dialog.state_from_dict(event["state"])
            if state is not None:
                self._sessions[state.session_id] = state

    def lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def get(self, session_id: str) -> DialogState:
        state = self._sessions.get(session_id)
        if state is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return state

    def create(self, state: DialogState) -> None:
        self._sessions[state.session_id] = state
        self.persist(state)

    def persist(self, state: DialogState) -> None:
        with open(self._session_path(state.session_id), "a", encoding="utf-8") as fh:
            fh.write(json.dumps(
                {"type": "state", "state": dialog.state_to_dict(state)},
                ensure_ascii=False,
            ) + "\n")
            fh.flush()


def create_app(engine: Engine, data_dir: str | Path,
               ui_origin: str = "http://localhost:5173") -> FastAPI:
    app = FastAPI(title="dialogkit", version="1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[ui_origin, "http://127.0.0.1:5173"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = SessionStore(data_dir)
    app.state.store = store
    app.state.engine = engine

    @app.post("/v1/sessions", status_code=201, response_model=SessionResponse)
    def create_session() -> SessionResponse:
        state = engine.new_session()
        store.create(state)
        return SessionResponse(session_id=state.session_id)

    @app.post("/v1/sessions/{session_id}/messages", response_model=MessageResponse)
    def post_message(session_id: str, message: MessageRequest) -> MessageResponse:
        with store.lock(session_id):
            state = store.get(session_id)
            if state.handed_off:
                raise HTTPException(
                    status_code=409, detail="session already handed off")
            try:
                result = engine.handle_turn(state, message.text)
            except EmptyUtterance:
                raise HTTPException(status_code=422, detail="empty message")
            store.persist(state)
            return MessageResponse(replies=result.replies, debug=result.debug)

    @app.get("/v1/sessions/{session_id}/transcript",
             response_model=TranscriptResponse)
    def get_transcript(session_id: str) -> TranscriptResponse:
        state = store.get(session_id)
        return TranscriptResponse(
            session_id=session_id,
            handed_off=state.handed_off,
            turns=[
                {"speaker": t.speaker, "text": t.text,
                 "annotations": t.annotations}
                for t in state.transcript
            ],
        )

    @app.post("/v1/sessions/{session_id}/handoff", response_model=HandoffResponse)
    def handoff(session_id: str) -> HandoffResponse:
        with store.lock(session_id):
            state = store.get(session_id)
            if state.handed_off:
                raise HTTPException(
                    status_code=409, detail="session already handed off")
            if not any(t.speaker == "user" for t in state.transcript):
                raise HTTPException(
                    status_code=409, detail="nothing to hand off yet")
            try:
                summary = boosters.summarize(engine.gateway, state.transcript)
            except (FormatParseError, ProviderError) as exc:
                raise HTTPException(status_code=502, detail=str(exc))
            state.handed_off = True
            store.persist(state)
            return HandoffResponse(
                session_id=session_id,
                action_required=summary.action_required,
                summary=summary.summary,
            )

    return app


def serve(engine: Engine, data_dir: str | Path, host: str = "127.0.0.1",
          port: int = 8710, ui_origin: str = "http://localhost:5173") -> None:
    import uvicorn

    uvicorn.run(create_app(engine, data_dir, ui_origin), host=host, port=port)
