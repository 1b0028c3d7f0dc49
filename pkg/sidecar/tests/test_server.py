import os

import pytest
from fastapi.testclient import TestClient

from qa_sidecar.model import ScoredSpans, SpanCandidate
from qa_sidecar.server import create_app


class LexicalStubScorer:
    """Deterministic scorer for protocol tests: every occurrence of each
    question word (or character, when the question has no spaces) becomes
    a candidate, earlier occurrences scoring higher."""

    def score(self, question, context, max_candidates):
        needles = question.replace("?", "").split() or \
            [ch for ch in question if ch not in "?？"]
        spans = {}
        for needle in needles:
            at = context.find(needle)
            while at != -1:
                spans[(at, at + len(needle))] = 10.0 / (1 + at)
                at = context.find(needle, at + 1)
        ranked = sorted(spans.items(), key=lambda kv: (-kv[1], kv[0]))
        candidates = tuple(
            SpanCandidate(start_char=s, end_char=e, text=context[s:e],
                          score=score)
            for (s, e), score in ranked[:max_candidates])
        return ScoredSpans(candidates=candidates, no_answer_score=-1.0)


class FailingScorer:
    def score(self, question, context, max_candidates):
        raise RuntimeError("weights not loaded")


@pytest.fixture()
def client():
    return TestClient(create_app(LexicalStubScorer()))


class TestExtractEndpoint:
    def test_ranked_slice_valid_spans(self, client):
        context = "alpha bravo charlie. bravo delta."
        response = client.post("/extract", json={
            "question": "bravo charlie", "context": context,
            "max_candidates": 5})
        assert response.status_code == 200
        doc = response.json()
        assert doc["candidates"]
        scores = [c["score"] for c in doc["candidates"]]
        assert scores == sorted(scores, reverse=True)
        for c in doc["candidates"]:
            assert context[c["start_char"]:c["end_char"]] == c["text"]
        assert doc["no_answer_score"] == -1.0

    def test_unicode_offsets(self, client):
        context = "従業員は三千人以上います。"
        response = client.post("/extract", json={
            "question": "何人？", "context": context, "max_candidates": 3})
        assert response.status_code == 200
        for c in response.json()["candidates"]:
            assert context[c["start_char"]:c["end_char"]] == c["text"]

    def test_max_candidates_respected(self, client):
        response = client.post("/extract", json={
            "question": "alpha", "context": "alpha alpha alpha alpha",
            "max_candidates": 2})
        assert len(response.json()["candidates"]) == 2

    def test_language_hint_accepted(self, client):
        response = client.post("/extract", json={
            "question": "alpha", "context": "alpha bravo",
            "language_hint": "fr"})
        assert response.status_code == 200

    @pytest.mark.parametrize("body", [
        {"question": "", "context": "alpha"},
        {"question": "   ", "context": "alpha"},
        {"question": "q", "context": ""},
        {"question": "q", "context": "alpha", "max_candidates": 0},
        {"question": "q"},
    ])
    def test_invalid_requests_422(self, client, body):
        assert client.post("/extract", json=body).status_code == 422

    def test_model_failure_500_with_diagnostic(self):
        client = TestClient(create_app(FailingScorer()),
                            raise_server_exceptions=False)
        response = client.post("/extract", json={
            "question": "q", "context": "alpha"})
        assert response.status_code == 500
        assert "weights not loaded" in response.json()["detail"]

    def test_healthz(self, client):
        assert client.get("/healthz").status_code == 200


MODEL_ID = os.environ.get("QA_SIDECAR_MODEL")


@pytest.mark.skipif(
    not MODEL_ID,
    reason="set QA_SIDECAR_MODEL to a fine-tuned QA checkpoint id/path to "
           "run real-model inference checks (weights are not bundled)")
class TestRealModel:
    def test_checkpoint_answers_a_simple_question(self):
        from qa_sidecar.model import SidecarConfig, TransformerSpanScorer

        scorer = TransformerSpanScorer(SidecarConfig(model_id=MODEL_ID))
        context = ("The company employs more than 3000 people in France. "
                   "The head office is in Paris.")
        result = scorer.score("How many people does the company employ?",
                              context, 3)
        assert result.candidates
        top = result.candidates[0]
        assert context[top.start_char:top.end_char] == top.text
        assert "3000" in top.text
