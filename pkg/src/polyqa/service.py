"""HTTP service exposing the chat platform and the extractor protocol.

Endpoints (UTF-8 JSON bodies):

* ``POST /chat {session_id, utterance}`` -> chat response with attribution
* ``POST /feedback {session_id, turn_id, polarity}``
* ``POST /qa {question}`` -> stateless best answer across sources
* ``POST /ingest`` -> refresh the knowledge store, returns the report
* ``GET /sources`` -> stored sources with freshness metadata
* ``GET /healthz`` -> 200 "ok"

``create_extract_app`` serves any extractor over the wire protocol
(``POST /extract``), which doubles as the loopback fixture for protocol
tests and as a baseline-backed stand-in for a model server.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Response
from pydantic import BaseModel

from . import dialog as dialog_mod
from .dialog import DialogEngine, FeedbackEvent, load_intents, qa_fallback
from .errors import UnknownTurn
from .extractor import (ExtractionRequest, Extractor, ExtractorEndpoint,
                        baseline_extract, remote_extract)
from .ingestion import SourceConfig, SourceStore, load_source_configs, refresh_store


@dataclass
class ServiceConfig:
    """Everything needed to run the service; loadable from one JSON file."""

    listen_host: str = "127.0.0.1"
    listen_port: int = 8080
    store_dir: str = "store"
    sources: list[SourceConfig] = field(default_factory=list)
    intents_path: Optional[str] = None
    extractor: str = "baseline"  # "baseline" or an endpoint base url
    intent_threshold: float = dialog_mod.DEFAULT_INTENT_THRESHOLD
    answer_threshold: float = dialog_mod.DEFAULT_ANSWER_THRESHOLD
    apology: str = dialog_mod.DEFAULT_APOLOGY
    rng_seed: int = 0
    window: int = 384
    stride: int = 128

    def to_json(self) -> dict:
        return {
            "listen_host": self.listen_host,
            "listen_port": self.listen_port,
            "store_dir": self.store_dir,
            "sources": [
                {"id": s.id, "url": s.url,
                 "language": s.language.code if s.language else None}
                for s in self.sources
            ],
            "intents_path": self.intents_path,
            "extractor": self.extractor,
            "intent_threshold": self.intent_threshold,
            "answer_threshold": self.answer_threshold,
            "apology": self.apology,
            "rng_seed": self.rng_seed,
            "window": self.window,
            "stride": self.stride,
        }


def load_config(path: Path | str) -> ServiceConfig:
    doc = json.loads(Path(path).read_text("utf-8"))
    config = ServiceConfig()
    for key in ("listen_host", "listen_port", "store_dir", "intents_path",
                "extractor", "intent_threshold", "answer_threshold",
                "apology", "rng_seed", "window", "stride"):
        if key in doc and doc[key] is not None:
            setattr(config, key, doc[key])
    if "sources" in doc:
        from .datamodel import LanguageTag
        config.sources = [
            SourceConfig(id=s["id"], url=s["url"],
                         language=LanguageTag(s["language"])
                         if s.get("language") else None)
            for s in doc["sources"]
        ]
    if not 0.0 <= config.intent_threshold <= 1.0:
        raise ValueError("intent_threshold must be in [0, 1]")
    return config


def make_extractor(selection: str) -> Extractor:
    """Resolve the configured extractor: "baseline" or an endpoint url."""
    if selection == "baseline":
        return baseline_extract
    endpoint = ExtractorEndpoint(base_url=selection)
    return lambda request: remote_extract(endpoint, request)


class ChatRequest(BaseModel):
    session_id: str
    utterance: str


class FeedbackRequest(BaseModel):
    session_id: str
    turn_id: str
    polarity: str


class QaRequest(BaseModel):
    question: str


def create_app(config: ServiceConfig,
               store: Optional[SourceStore] = None) -> FastAPI:
    app = FastAPI(title="polyqa")
    store = store if store is not None else SourceStore(config.store_dir)
    extractor = make_extractor(config.extractor)
    intents = load_intents(config.intents_path) if config.intents_path else []
    engine = DialogEngine(
        intents=intents,
        store=store,
        extractor=extractor,
        intent_threshold=config.intent_threshold,
        answer_threshold=config.answer_threshold,
        apology=config.apology,
        rng_seed=config.rng_seed,
        window=config.window,
        stride=config.stride,
    )
    app.state.engine = engine
    app.state.store = store
    # Turns within one session are serialized; sessions stay concurrent.
    session_locks: dict[str, threading.Lock] = {}
    locks_guard = threading.Lock()

    def session_lock(session_id: str) -> threading.Lock:
        with locks_guard:
            return session_locks.setdefault(session_id, threading.Lock())

    def turn_payload(turn) -> dict:
        payload = {
            "turn_id": turn.turn_id,
            "response_text": turn.response_text,
            "resolution": turn.resolution,
        }
        if turn.resolution == "qa":
            source = store.get(turn.qa.source_id)
            payload["attribution"] = {
                "source_id": turn.qa.source_id,
                "url": source.url if source else None,
                "start_char": turn.qa.candidate.start_char,
                "end_char": turn.qa.candidate.end_char,
            }
        return payload

    @app.get("/healthz")
    def healthz():
        return Response(content="ok", media_type="text/plain")

    @app.post("/chat")
    def chat(request: ChatRequest):
        if not request.utterance.strip():
            raise HTTPException(status_code=422, detail="empty utterance")
        if len(store) == 0:
            raise HTTPException(status_code=503,
                                detail="no sources ingested yet")
        with session_lock(request.session_id):
            turn = engine.handle_message(request.session_id,
                                         request.utterance)
        return turn_payload(turn)

    @app.post("/feedback")
    def feedback(request: FeedbackRequest):
        if request.polarity not in ("positive", "negative"):
            raise HTTPException(status_code=422,
                                detail="polarity must be positive|negative")
        event = FeedbackEvent(session_id=request.session_id,
                              turn_id=request.turn_id,
                              polarity=request.polarity)
        try:
            with session_lock(request.session_id):
                follow_up = engine.handle_feedback(event)
        except UnknownTurn as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        return {"recorded": True,
                "follow_up": turn_payload(follow_up) if follow_up else None}

    @app.post("/qa")
    def qa(request: QaRequest):
        """Stateless QA over the knowledge base; never touches sessions."""
        if not request.question.strip():
            raise HTTPException(status_code=422, detail="empty question")
        if len(store) == 0:
            raise HTTPException(status_code=503,
                                detail="no sources ingested yet")
        ranked = qa_fallback(request.question, store, extractor,
                             answer_threshold=config.answer_threshold,
                             window=config.window, stride=config.stride)
        if not ranked:
            return {"no_answer": True}
        source_id, candidate = ranked[0]
        source = store.get(source_id)
        return {
            "answer": candidate.text,
            "score": candidate.score,
            "source_url": source.url if source else None,
            "start_char": candidate.start_char,
            "end_char": candidate.end_char,
        }

    @app.post("/ingest")
    def ingest():
        report = refresh_store(store, config.sources)
        return {"results": [
            {"id": r.source_id, "url": r.url, "status": r.status,
             "detail": r.detail}
            for r in report
        ]}

    @app.get("/sources")
    def sources():
        return {"sources": [
            {"id": s.id, "url": s.url, "title": s.title,
             "fetched_at": s.fetched_at,
             "language": s.language.code if s.language else None}
            for s in store.sources()
        ]}

    return app


class ExtractBody(BaseModel):
    question: str
    context: str
    max_candidates: int = 5
    language_hint: Optional[str] = None


def create_extract_app(extractor: Extractor = baseline_extract) -> FastAPI:
    """Serve an extractor over the wire protocol (POST /extract)."""
    from .datamodel import LanguageTag

    app = FastAPI(title="polyqa-extractor")

    @app.post("/extract")
    def extract(body: ExtractBody):
        try:
            hint = LanguageTag(body.language_hint) if body.language_hint \
                else None
            request = ExtractionRequest(
                question=body.question,
                context=body.context,
                max_candidates=body.max_candidates,
                language_hint=hint,
            )
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        candidates = extractor(request)
        no_answer = candidates[0].no_answer_score if candidates else 0.0
        return {
            "candidates": [
                {"start_char": c.start_char, "end_char": c.end_char,
                 "text": c.text, "score": c.score}
                for c in candidates
            ],
            "no_answer_score": no_answer,
        }

    return app
