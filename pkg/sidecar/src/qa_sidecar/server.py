"""FastAPI app serving a SpanScorer over the extractor wire protocol."""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .model import SpanScorer


class ExtractBody(BaseModel):
    question: str
    context: str
    max_candidates: int = 5
    language_hint: Optional[str] = None


def create_app(scorer: SpanScorer) -> FastAPI:
    app = FastAPI(title="qa-sidecar")

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/extract")
    def extract(body: ExtractBody):
        if not body.question.strip():
            raise HTTPException(status_code=422, detail="empty question")
        if not body.context.strip():
            raise HTTPException(status_code=422, detail="empty context")
        if body.max_candidates < 1:
            raise HTTPException(status_code=422,
                                detail="max_candidates must be >= 1")
        try:
            result = scorer.score(body.question, body.context,
                                  body.max_candidates)
        except Exception as exc:  # surfaced as a diagnostic, not a traceback
            raise HTTPException(
                status_code=500,
                detail=f"model failure: {type(exc).__name__}: {exc}",
            ) from exc
        return {
            "candidates": [
                {"start_char": c.start_char, "end_char": c.end_char,
                 "text": c.text, "score": c.score}
                for c in result.candidates
            ],
            "no_answer_score": result.no_answer_score,
        }

    return app
