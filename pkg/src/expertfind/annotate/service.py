"""HTTP+JSON API for the annotation protocol.

Per-session mutations are serialized through a session lock; reads
return plain snapshots.  Every event is appended to the session's log
before the response goes out.  Errors carry structured codes:
{"error": {"code": ..., "message": ...}}.
"""

from __future__ import annotations

import threading
import time
from pathlib import Path
from typing import Optional

from fastapi import Depends, FastAPI, Header, HTTPException, Query, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from ..classes import CLASS_NAMES
from ..corpus.store import CorpusStore
from .model import (
    DEFAULT_WARMUP_SIZE,
    AnnotationSession,
    EvidenceSet,
    ProtocolError,
    SessionLog,
    load_criteria,
)


class SessionCreateBody(BaseModel):
    sample_ids: list[str] = Field(min_length=1)
    coder_a: str
    coder_b: str
    warmup_size: int = DEFAULT_WARMUP_SIZE


class LabelBody(BaseModel):
    coder: str
    comment_id: str
    classes: list[str] = Field(min_length=1)
    criteria: list[str] = Field(default_factory=list)


class AdjudicationBody(BaseModel):
    comment_id: str
    final_class: str
    note: str = ""


class SessionManager:
    """Loads, caches and serializes access to annotation sessions."""

    def __init__(self, data_dir: str | Path):
        self.log = SessionLog(data_dir)
        self._sessions: dict[str, AnnotationSession] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def lock_for(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def create(self, body: SessionCreateBody, now=time.time) -> AnnotationSession:
        session = AnnotationSession.create(
            sample_ids=body.sample_ids,
            coder_a=body.coder_a,
            coder_b=body.coder_b,
            warmup_size=body.warmup_size,
            now=now,
        )
        with self.lock_for(session.id):
            self.log.append(session.id, session.events, 0)
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> AnnotationSession:
        if session_id not in self._sessions:
            self._sessions[session_id] = self.log.load(session_id)
        return self._sessions[session_id]

    def mutate(self, session_id: str, fn):
        """Run fn(session) under the session lock, then persist the new
        events; the log write happens before the result is returned."""
        with self.lock_for(session_id):
            session = self.get(session_id)
            n_before = len(session.events)
            result = fn(session)
            self.log.append(session_id, session.events, n_before)
            return session, result


def create_app(
    data_dir: str | Path,
    store_dir: Optional[str | Path] = None,
    token: Optional[str] = None,
    static_dir: Optional[str | Path] = None,
) -> FastAPI:
    """Build the service.

    store_dir (optional) attaches a corpus store so /next can serve
    comment text and post context.  token (optional) enables shared-
    token auth on the session routes.
    """
    app = FastAPI(title="annotation service")
    manager = SessionManager(data_dir)
    app.state.manager = manager
    store: Optional[CorpusStore] = None
    if store_dir is not None:
        store = CorpusStore.load(store_dir)

    def check_token(authorization: Optional[str] = Header(default=None)) -> None:
        if token is None:
            return
        expected = f"Bearer {token}"
        if authorization != expected:
            raise HTTPException(status_code=401, detail="missing or bad token")

    guarded = [Depends(check_token)]

    @app.exception_handler(ProtocolError)
    async def protocol_error_handler(request, exc: ProtocolError):
        status = 404 if exc.code == "unknown_session" else 409
        return JSONResponse(
            status_code=status,
            content={"error": {"code": exc.code, "message": exc.message}},
        )

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/criteria")
    def criteria():
        return load_criteria()

    @app.post("/sessions", dependencies=guarded)
    def create_session(body: SessionCreateBody):
        session = manager.create(body)
        return session.snapshot()

    @app.get("/sessions/{session_id}", dependencies=guarded)
    def get_session(session_id: str):
        return manager.get(session_id).snapshot()

    @app.get("/sessions/{session_id}/next", dependencies=guarded)
    def next_item(session_id: str, coder: str = Query(...)):
        session = manager.get(session_id)
        cid = session.next_for(coder)
        if cid is None:
            return {
                "comment_id": None,
                "state": session.state,
                "round_index": session.current_round().index,
            }
        rnd = session.current_round()
        remaining = sum(
            1
            for other in rnd.ids
            if coder in rnd.assignment[other] and (coder, other) not in rnd.labels
        )
        payload = {
            "comment_id": cid,
            "state": session.state,
            "round_index": rnd.index,
            "remaining_in_round": remaining,
            "body": None,
            "post_title": None,
        }
        if store is not None and cid in store.comments:
            comment = store.comments[cid]
            payload["body"] = comment.body
            post = store.posts.get(comment.post_id)
            payload["post_title"] = post.title if post else None
        return payload

    @app.post("/sessions/{session_id}/labels", dependencies=guarded)
    def submit_label(session_id: str, body: LabelBody):
        evidence = EvidenceSet.of(body.classes, body.criteria)
        _, resolved = manager.mutate(
            session_id,
            lambda s: s.submit_label(body.coder, body.comment_id, evidence),
        )
        return {"comment_id": body.comment_id, "recorded": CLASS_NAMES[resolved]}

    @app.post("/sessions/{session_id}/rounds/close", dependencies=guarded)
    def close_round(session_id: str):
        session, rnd = manager.mutate(session_id, lambda s: s.close_round())
        return {
            "round_index": rnd.index,
            "kappa": rnd.kappa,
            "gate_passed": rnd.kappa is not None and rnd.kappa >= 0.70,
            "state": session.state,
        }

    @app.get("/sessions/{session_id}/agreement", dependencies=guarded)
    def agreement(session_id: str):
        return manager.get(session_id).agreement_report()

    @app.post("/sessions/{session_id}/adjudications", dependencies=guarded)
    def adjudicate(session_id: str, body: AdjudicationBody):
        session, final = manager.mutate(
            session_id,
            lambda s: s.adjudicate(body.comment_id, body.final_class, body.note),
        )
        return {
            "comment_id": body.comment_id,
            "consensus": CLASS_NAMES[final],
            "state": session.state,
        }

    @app.get("/sessions/{session_id}/export", dependencies=guarded)
    def export(session_id: str):
        session = manager.get(session_id)
        return Response(
            content=session.export_text(), media_type="application/x-ndjson"
        )

    if static_dir is not None and Path(static_dir).exists():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
