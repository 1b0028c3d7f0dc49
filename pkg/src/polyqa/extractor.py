"""Answer-span extraction: chunking, baseline scorer, remote protocol client.

Any extractor maps an (question, context) request to ranked character-offset
span candidates. Long contexts are handled by sliding-window chunking with
offset remapping back into the original text. The built-in baseline is a
deterministic lexical scorer (sentence-level IDF overlap) so the whole
pipeline is testable without a neural model; a model server plugs in over
the HTTP wire protocol (POST /extract).

All offsets are Unicode scalar values into the original context.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Protocol

import httpx

from .datamodel import CHARACTER_DELIMITED, LanguageTag
from .errors import (DegenerateWindow, EndpointUnreachable, ExtractionTimeout,
                     ProtocolViolation)
from .metrics import default_profile, normalize_answer

MAX_SPAN_TOKENS = 30  # baseline candidate spans never exceed this many tokens

_SENTENCE_BREAKS = set(".!?。\n")


@dataclass(frozen=True)
class ExtractionRequest:
    question: str
    context: str
    max_candidates: int = 5
    language_hint: Optional[LanguageTag] = None

    def __post_init__(self):
        if not self.question or not self.context:
            raise ValueError("question and context must be non-empty")
        if self.max_candidates < 1:
            raise ValueError("max_candidates must be >= 1")


@dataclass(frozen=True)
class SpanCandidate:
    start_char: int
    end_char: int
    text: str
    score: float
    no_answer_score: Optional[float] = None

    def check_against(self, context: str) -> None:
        """Raise ProtocolViolation unless the span is a valid slice of context."""
        if not (0 <= self.start_char < self.end_char <= len(context)):
            raise ProtocolViolation(
                f"span [{self.start_char}, {self.end_char}) out of bounds "
                f"for context of length {len(context)}")
        if context[self.start_char:self.end_char] != self.text:
            raise ProtocolViolation(
                f"span text {self.text!r} does not match context slice")


class Extractor(Protocol):
    def __call__(self, request: ExtractionRequest) -> list[SpanCandidate]: ...


@dataclass(frozen=True)
class Token:
    text: str
    start: int  # char offset into the source text
    end: int


def tokenize_with_offsets(text: str, language: Optional[LanguageTag] = None,
                          ) -> list[Token]:
    """Split into offset-carrying tokens: whitespace words, or single
    characters for languages written without word spaces."""
    if language is not None and language.script_class == CHARACTER_DELIMITED:
        return [Token(ch, i, i + 1) for i, ch in enumerate(text)
                if not ch.isspace()]
    tokens = []
    start = None
    for i, ch in enumerate(text):
        if ch.isspace():
            if start is not None:
                tokens.append(Token(text[start:i], start, i))
                start = None
        elif start is None:
            start = i
    if start is not None:
        tokens.append(Token(text[start:], start, len(text)))
    return tokens


@dataclass(frozen=True)
class Chunk:
    text: str
    base_offset: int  # char offset of this chunk in the original context


@dataclass(frozen=True)
class ChunkMap:
    chunks: tuple[Chunk, ...]
    window: int
    stride: int


def chunk_context(context: str, window: int, stride: int,
                  tokenizer: Callable[[str], list[Token]] | None = None,
                  ) -> ChunkMap:
    """Overlapping token windows covering every character of the context.

    Chunk i starts at token i*stride and spans up to `window` tokens; its
    character range is extended to the start of the first excluded token
    (or the ends of the text), so the chunks' union is the whole context
    and any span shorter than window - stride tokens lies wholly inside
    at least one chunk.
    """
    if not (window > stride > 0):
        raise DegenerateWindow(f"need window > stride > 0, got {window}/{stride}")
    tokenizer = tokenizer or tokenize_with_offsets
    tokens = tokenizer(context)
    if len(tokens) <= window:
        return ChunkMap(chunks=(Chunk(context, 0),), window=window, stride=stride)

    chunks = []
    start = 0
    while True:
        end = min(start + window, len(tokens))
        char_start = 0 if start == 0 else tokens[start].start
        char_end = len(context) if end == len(tokens) else tokens[end].start
        chunks.append(Chunk(context[char_start:char_end], char_start))
        if end == len(tokens):
            break
        start += stride
    return ChunkMap(chunks=tuple(chunks), window=window, stride=stride)


def _split_sentences(tokens: list[Token], context: str) -> list[list[int]]:
    """Group token indices into sentences, breaking on ., !, ?, 。, newline."""
    sentences: list[list[int]] = []
    current: list[int] = []
    for i, token in enumerate(tokens):
        current.append(i)
        tail = context[token.end:tokens[i + 1].start] if i + 1 < len(tokens) \
            else context[token.end:]
        if _SENTENCE_BREAKS & set(tail) or _SENTENCE_BREAKS & set(token.text[-1:]):
            sentences.append(current)
            current = []
    if current:
        sentences.append(current)
    return sentences


def baseline_extract(request: ExtractionRequest) -> list[SpanCandidate]:
    """Deterministic lexical extractor, the model-free reference backend.

    Question tokens are normalized and weighted by their inverse document
    frequency over the context's sentences; every token-aligned span of at
    most MAX_SPAN_TOKENS tokens is scored by the summed IDF weight of the
    distinct question tokens it contains, divided by sqrt(span length in
    tokens). Ties break toward the earlier, then shorter span.
    """
    profile = default_profile(request.language_hint or LanguageTag("en"))
    question_tokens = set(normalize_answer(request.question, profile))
    if not question_tokens:
        return []

    ctx_tokens = tokenize_with_offsets(request.context, profile.language)
    if not ctx_tokens:
        return []
    # Normalized form of each context token ("" when normalized away).
    norm = [" ".join(normalize_answer(t.text, profile)) for t in ctx_tokens]

    sentences = _split_sentences(ctx_tokens, request.context)
    n_sentences = len(sentences)
    doc_freq: dict[str, int] = {}
    for sentence in sentences:
        for term in {norm[i] for i in sentence} & question_tokens:
            doc_freq[term] = doc_freq.get(term, 0) + 1
    # Smoothed so terms present in every sentence still carry weight.
    idf = {term: math.log(n_sentences / df) + 1.0
           for term, df in doc_freq.items()}
    if not idf:
        return []

    candidates = _score_spans(ctx_tokens, norm, idf, request.max_candidates)
    if not candidates:
        return []
    top_score = candidates[0][0]
    return [
        SpanCandidate(
            start_char=ctx_tokens[i].start,
            end_char=ctx_tokens[j].end,
            text=request.context[ctx_tokens[i].start:ctx_tokens[j].end],
            score=score,
            no_answer_score=0.0 - top_score,
        )
        for score, i, j in candidates
    ]


def _score_spans(ctx_tokens, norm, idf, max_candidates):
    """Rank all spans of <= MAX_SPAN_TOKENS tokens; returns (score, i, j)
    triples sorted by (score desc, start asc, length asc), positive only."""
    n = len(ctx_tokens)
    scored: list[tuple[float, int, int]] = []
    for i in range(n):
        present: dict[str, int] = {}
        running = 0.0
        for j in range(i, min(i + MAX_SPAN_TOKENS, n)):
            term = norm[j]
            if term in idf:
                count = present.get(term, 0)
                if count == 0:
                    running += idf[term]
                present[term] = count + 1
            if running > 0.0:
                score = running / math.sqrt(j - i + 1)
                scored.append((score, i, j))
    scored.sort(key=lambda t: (-t[0], t[1], t[2] - t[1]))
    return scored[:max_candidates]


@dataclass(frozen=True)
class ExtractorEndpoint:
    base_url: str
    timeout: float = 30.0


def remote_extract(endpoint: ExtractorEndpoint,
                   request: ExtractionRequest) -> list[SpanCandidate]:
    """Call a model server over the wire protocol and re-validate its spans."""
    payload = {
        "question": request.question,
        "context": request.context,
        "max_candidates": request.max_candidates,
    }
    if request.language_hint is not None:
        payload["language_hint"] = request.language_hint.code
    url = endpoint.base_url.rstrip("/") + "/extract"
    try:
        response = httpx.post(url, json=payload, timeout=endpoint.timeout)
    except httpx.TimeoutException as exc:
        raise ExtractionTimeout(f"{url}: {exc}") from exc
    except httpx.HTTPError as exc:
        raise EndpointUnreachable(f"{url}: {exc}") from exc
    if response.status_code != 200:
        raise ProtocolViolation(
            f"{url} returned status {response.status_code}: {response.text[:200]}")
    try:
        body = response.json()
        raw_candidates = body["candidates"]
        no_answer = body.get("no_answer_score")
        candidates = [
            SpanCandidate(
                start_char=int(c["start_char"]),
                end_char=int(c["end_char"]),
                text=c["text"],
                score=float(c["score"]),
                no_answer_score=None if no_answer is None else float(no_answer),
            )
            for c in raw_candidates
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise ProtocolViolation(f"malformed response payload: {exc}") from exc
    for candidate in candidates:
        candidate.check_against(request.context)
    return candidates


def _overlap_ratio(a: SpanCandidate, b: SpanCandidate) -> float:
    overlap = min(a.end_char, b.end_char) - max(a.start_char, b.start_char)
    if overlap <= 0:
        return 0.0
    shorter = min(a.end_char - a.start_char, b.end_char - b.start_char)
    return overlap / shorter


def merge_candidates(candidates: list[SpanCandidate],
                     max_candidates: int) -> list[SpanCandidate]:
    """Drop candidates overlapping a higher-scored one by >50% of the
    shorter span; keep the global top max_candidates."""
    ordered = sorted(candidates,
                     key=lambda c: (-c.score, c.start_char,
                                    c.end_char - c.start_char))
    kept: list[SpanCandidate] = []
    for candidate in ordered:
        if all(_overlap_ratio(candidate, k) <= 0.5 for k in kept):
            kept.append(candidate)
        if len(kept) == max_candidates:
            break
    return kept


def extract_over_chunks(extractor: Extractor, request: ExtractionRequest,
                        window: int = 384, stride: int = 128,
                        tokenizer: Callable[[str], list[Token]] | None = None,
                        ) -> list[SpanCandidate]:
    """Run the extractor per chunk, remap offsets into the original context,
    merge overlapping duplicates, return the global top candidates."""
    chunk_map = chunk_context(request.context, window, stride, tokenizer)
    collected: list[SpanCandidate] = []
    for chunk in chunk_map.chunks:
        chunk_request = ExtractionRequest(
            question=request.question,
            context=chunk.text,
            max_candidates=request.max_candidates,
            language_hint=request.language_hint,
        )
        for local in extractor(chunk_request):
            remapped = SpanCandidate(
                start_char=local.start_char + chunk.base_offset,
                end_char=local.end_char + chunk.base_offset,
                text=local.text,
                score=local.score,
                no_answer_score=local.no_answer_score,
            )
            remapped.check_against(request.context)
            collected.append(remapped)
    return merge_candidates(collected, request.max_candidates)
