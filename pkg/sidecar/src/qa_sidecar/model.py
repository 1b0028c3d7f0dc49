"""Span decoding and the transformer-backed scorer.

``decode_spans`` is a pure function from start/end logits plus a
character offset mapping to ranked character-level span candidates, so
the decoding rules are testable without model weights.  The
``TransformerSpanScorer`` wraps a question-answering checkpoint and
feeds its logits through the same function.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Protocol, Sequence

MAX_ANSWER_TOKENS = 30


@dataclass(frozen=True)
class SidecarConfig:
    """Settings for the model server, loadable from CLI flags or JSON."""

    model_id: str
    device: str = "cpu"
    max_seq_len: int = 384
    batch_size: int = 8
    max_answer_tokens: int = MAX_ANSWER_TOKENS

    def __post_init__(self):
        if not self.model_id:
            raise ValueError("model_id must be non-empty")
        if self.max_seq_len < 16:
            raise ValueError("max_seq_len must be at least 16")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if self.max_answer_tokens < 1:
            raise ValueError("max_answer_tokens must be at least 1")


@dataclass(frozen=True)
class SpanCandidate:
    start_char: int
    end_char: int
    text: str
    score: float


@dataclass(frozen=True)
class ScoredSpans:
    candidates: tuple[SpanCandidate, ...]
    no_answer_score: float


class SpanScorer(Protocol):
    """Anything that maps a question/context pair to ranked spans."""

    def score(self, question: str, context: str,
              max_candidates: int) -> ScoredSpans: ...


def decode_spans(
    start_logits: Sequence[float],
    end_logits: Sequence[float],
    offsets: Sequence[Optional[tuple[int, int]]],
    context: str,
    max_candidates: int,
    max_answer_tokens: int = MAX_ANSWER_TOKENS,
) -> ScoredSpans:
    """Turn per-token logits into ranked character spans.

    ``offsets[i]`` is the (start_char, end_char) of token i within
    ``context``, or None for question and special tokens.  A candidate
    is any token pair i <= j < i + max_answer_tokens with both tokens
    inside the context and a non-empty character slice; its score is
    start_logits[i] + end_logits[j].  Candidates are ranked by score
    descending, then earlier start, then shorter span, and duplicate
    character spans are dropped.  The no-answer score is the null span
    (position 0, conventionally [CLS]) when position 0 is special,
    else 0.0.
    """
    if not (len(start_logits) == len(end_logits) == len(offsets)):
        raise ValueError("logits and offsets must have equal length")
    in_context = [
        i for i, span in enumerate(offsets)
        if span is not None and span[0] < span[1]
    ]
    scored: dict[tuple[int, int], float] = {}
    for i in in_context:
        for j in in_context:
            if j < i or j - i >= max_answer_tokens:
                continue
            start_char = offsets[i][0]
            end_char = offsets[j][1]
            if start_char >= end_char:
                continue
            score = start_logits[i] + end_logits[j]
            key = (start_char, end_char)
            if key not in scored or score > scored[key]:
                scored[key] = score

    ranked = sorted(scored.items(),
                    key=lambda kv: (-kv[1], kv[0][0], kv[0][1] - kv[0][0]))
    candidates = tuple(
        SpanCandidate(start_char=s, end_char=e, text=context[s:e],
                      score=score)
        for (s, e), score in ranked[:max_candidates]
    )
    if offsets and offsets[0] is None:
        no_answer = start_logits[0] + end_logits[0]
    else:
        no_answer = 0.0
    return ScoredSpans(candidates=candidates, no_answer_score=no_answer)


class TransformerSpanScorer:
    """Runs a question-answering checkpoint over a single pair.

    Loads the tokenizer and model lazily at construction; inference is
    single-example (the wire protocol is one pair per request) and runs
    under ``torch.no_grad`` on the configured device.
    """

    def __init__(self, config: SidecarConfig):
        import torch
        from transformers import (AutoModelForQuestionAnswering,
                                  AutoTokenizer)

        self.config = config
        self._torch = torch
        self.tokenizer = AutoTokenizer.from_pretrained(config.model_id)
        self.model = AutoModelForQuestionAnswering.from_pretrained(
            config.model_id)
        self.model.to(config.device)
        self.model.eval()

    def score(self, question: str, context: str,
              max_candidates: int) -> ScoredSpans:
        torch = self._torch
        encoded = self.tokenizer(
            question,
            context,
            truncation="only_second",
            max_length=self.config.max_seq_len,
            return_offsets_mapping=True,
            return_tensors="pt",
        )
        offset_mapping = encoded.pop("offset_mapping")[0].tolist()
        sequence_ids = encoded.sequence_ids(0)
        encoded = {k: v.to(self.config.device) for k, v in encoded.items()}
        with torch.no_grad():
            output = self.model(**encoded)
        start_logits = output.start_logits[0].tolist()
        end_logits = output.end_logits[0].tolist()
        offsets: list[Optional[tuple[int, int]]] = [
            (int(lo), int(hi)) if sequence_ids[i] == 1 else None
            for i, (lo, hi) in enumerate(offset_mapping)
        ]
        return decode_spans(start_logits, end_logits, offsets, context,
                            max_candidates, self.config.max_answer_tokens)
