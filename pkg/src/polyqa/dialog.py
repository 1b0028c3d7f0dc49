"""Conversational engine: scripted intents with a QA fallback.

Each user utterance first goes to an intent classifier; a confident match
yields a scripted response (random template, entity slots filled). When
classification fails, or on negative feedback, the question is answered by
running the extractor over every knowledge source and keeping the best
span across all of them. Below the answer threshold the agent apologizes.

The built-in classifier is purely lexical (token-overlap F1 against the
intent's training phrases); external NLU engines can plug in behind the
same interface.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Optional

from .errors import (AllSourcesFailed, EmptyStore, MissingEntities,
                     UnknownTurn)
from .extractor import (ExtractionRequest, Extractor, SpanCandidate,
                        extract_over_chunks)
from .ingestion import SourceStore
from .metrics import ENGLISH_PROFILE, NormalizationProfile, normalize_answer, _token_f1

DEFAULT_INTENT_THRESHOLD = 0.7
DEFAULT_ANSWER_THRESHOLD = 0.0
DEFAULT_APOLOGY = "Sorry, I could not find an answer to that."

_SLOT_RE = re.compile(r"\{([a-zA-Z_][a-zA-Z0-9_]*)\}")


@dataclass(frozen=True)
class ScriptedIntent:
    intent_id: str
    training_phrases: list[str]
    responses: list[str]  # templates with {slot} placeholders
    required_entities: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.responses:
            raise ValueError(f"intent {self.intent_id}: responses must be non-empty")
        for template in self.responses:
            unknown = set(_SLOT_RE.findall(template)) - set(self.required_entities)
            if unknown:
                raise ValueError(
                    f"intent {self.intent_id}: template slot(s) "
                    f"{sorted(unknown)} not in required_entities")


@dataclass(frozen=True)
class IntentMatch:
    intent_id: str
    confidence: float
    entities: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must be in [0, 1]")


def _phrase_regex(phrase: str) -> re.Pattern:
    parts = []
    last = 0
    for match in _SLOT_RE.finditer(phrase):
        parts.append(re.escape(phrase[last:match.start()]))
        parts.append(f"(?P<{match.group(1)}>.+?)")
        last = match.end()
    parts.append(re.escape(phrase[last:]))
    return re.compile("^" + "".join(parts) + "$", re.IGNORECASE)


def classify_intent(utterance: str, intents: list[ScriptedIntent],
                    profile: NormalizationProfile = ENGLISH_PROFILE,
                    ) -> Optional[IntentMatch]:
    """Best lexical intent match, or None below confidence 0 overlap.

    Phrases with entity slots are matched as patterns (confidence 1.0 with
    captured entities); plain phrases score by normalized token-overlap F1.
    Ties resolve to the lower lexicographic intent id. Thresholding is the
    caller's job (the engine compares against its configured threshold).
    """
    utterance_tokens = normalize_answer(utterance, profile)
    best: Optional[IntentMatch] = None
    for intent in sorted(intents, key=lambda i: i.intent_id):
        for phrase in intent.training_phrases:
            if _SLOT_RE.search(phrase):
                match = _phrase_regex(phrase).match(utterance.strip())
                if match:
                    entities = {k: v.strip() for k, v in
                                match.groupdict().items()}
                    candidate = IntentMatch(intent.intent_id, 1.0, entities)
                    if best is None or candidate.confidence > best.confidence:
                        best = candidate
                    continue
            score = _token_f1(utterance_tokens,
                              normalize_answer(phrase, profile))
            if score > 0 and (best is None or score > best.confidence):
                best = IntentMatch(intent.intent_id, score)
    return best


def scripted_response(match: IntentMatch, intent: ScriptedIntent,
                      rng: random.Random | int) -> str:
    """Uniformly random template choice, entity slots substituted."""
    if isinstance(rng, int):
        rng = random.Random(rng)
    template = rng.choice(intent.responses)
    slots = set(_SLOT_RE.findall(template))
    missing = slots - match.entities.keys()
    if missing:
        raise MissingEntities(missing)
    return _SLOT_RE.sub(lambda m: match.entities[m.group(1)], template)


@dataclass(frozen=True)
class QaResolution:
    source_id: str
    candidate: SpanCandidate


@dataclass(frozen=True)
class DialogTurn:
    turn_id: str
    session_id: str
    utterance: str
    resolution: str  # scripted | qa | no_answer
    response_text: str
    timestamp: str
    intent_id: Optional[str] = None
    qa: Optional[QaResolution] = None
    # remaining ranked (source_id, candidate) pairs, for next-best on feedback
    alternates: tuple = ()


@dataclass(frozen=True)
class FeedbackEvent:
    session_id: str
    turn_id: str
    polarity: str  # positive | negative


def qa_fallback(question: str, store: SourceStore, extractor: Extractor,
                answer_threshold: float = DEFAULT_ANSWER_THRESHOLD,
                window: int = 384, stride: int = 128,
                max_candidates: int = 5,
                on_source_error: Callable[[str, Exception], None] | None = None,
                ) -> list[tuple[str, SpanCandidate]]:
    """Extract from every source; return candidates ranked best-first.

    The winner is the global argmax across sources ("best result among all
    sources"); ties break to the lower lexicographic source id. An empty
    list means no candidate reached the answer threshold. Failing sources
    are skipped (reported via on_source_error); if every source fails,
    raises AllSourcesFailed.
    """
    if len(store) == 0:
        raise EmptyStore("no knowledge sources ingested")
    ranked: list[tuple[str, SpanCandidate]] = []
    failures = 0
    for source in store.sources():
        request = ExtractionRequest(
            question=question,
            context=source.text,
            max_candidates=max_candidates,
            language_hint=source.language,
        )
        try:
            candidates = extract_over_chunks(extractor, request,
                                             window=window, stride=stride)
        except Exception as exc:
            failures += 1
            if on_source_error is not None:
                on_source_error(source.id, exc)
            continue
        ranked.extend((source.id, c) for c in candidates)
    if failures and failures == len(store):
        raise AllSourcesFailed("extraction failed on every source")
    ranked.sort(key=lambda pair: (-pair[1].score, pair[0],
                                  pair[1].start_char))
    return [(sid, c) for sid, c in ranked if c.score >= answer_threshold]


class DialogEngine:
    """Session-scoped conversation state over intents + QA fallback."""

    def __init__(self, intents: list[ScriptedIntent], store: SourceStore,
                 extractor: Extractor,
                 intent_threshold: float = DEFAULT_INTENT_THRESHOLD,
                 answer_threshold: float = DEFAULT_ANSWER_THRESHOLD,
                 apology: str = DEFAULT_APOLOGY,
                 rng_seed: int = 0,
                 window: int = 384, stride: int = 128,
                 classifier=classify_intent):
        self.intents = {intent.intent_id: intent for intent in intents}
        self.store = store
        self.extractor = extractor
        self.intent_threshold = intent_threshold
        self.answer_threshold = answer_threshold
        self.apology = apology
        self.window = window
        self.stride = stride
        self._classifier = classifier
        self._rng = random.Random(rng_seed)
        self._sessions: dict[str, list[DialogTurn]] = {}
        self._turns: dict[str, DialogTurn] = {}
        self._feedback: list[FeedbackEvent] = []

    # --- turn handling ---

    def handle_message(self, session_id: str, utterance: str) -> DialogTurn:
        """Route one utterance: scripted on a confident intent match,
        QA fallback otherwise; degenerate input gets the apology."""
        if not utterance.strip():
            return self._append(session_id, utterance, "no_answer",
                                self.apology)
        match = self._classifier(utterance, list(self.intents.values()))
        if match is not None and match.confidence >= self.intent_threshold:
            intent = self.intents[match.intent_id]
            try:
                text = scripted_response(match, intent, self._rng)
            except MissingEntities:
                return self._qa_turn(session_id, utterance)
            return self._append(session_id, utterance, "scripted", text,
                                intent_id=match.intent_id)
        return self._qa_turn(session_id, utterance)

    def _qa_turn(self, session_id: str, utterance: str) -> DialogTurn:
        try:
            ranked = qa_fallback(utterance, self.store, self.extractor,
                                 answer_threshold=self.answer_threshold,
                                 window=self.window, stride=self.stride)
        except (EmptyStore, AllSourcesFailed):
            ranked = []
        if not ranked:
            return self._append(session_id, utterance, "no_answer",
                                self.apology)
        source_id, candidate = ranked[0]
        return self._append(session_id, utterance, "qa", candidate.text,
                            qa=QaResolution(source_id, candidate),
                            alternates=tuple(ranked[1:]))

    def handle_feedback(self, event: FeedbackEvent) -> Optional[DialogTurn]:
        """Record feedback; negative feedback escalates to (or within) QA.

        Negative on a scripted turn reruns the utterance through QA,
        bypassing intent classification; negative on a QA turn surfaces the
        next-best candidate, or apologizes once exhausted. Positive
        feedback is recorded only.
        """
        turn = self._turns.get(event.turn_id)
        if turn is None or turn.session_id != event.session_id:
            raise UnknownTurn(f"no turn {event.turn_id!r} in session "
                              f"{event.session_id!r}")
        self._feedback.append(event)
        if event.polarity != "negative":
            return None
        if turn.resolution == "scripted":
            return self._qa_turn(event.session_id, turn.utterance)
        if turn.resolution == "qa":
            if turn.alternates:
                source_id, candidate = turn.alternates[0]
                return self._append(
                    event.session_id, turn.utterance, "qa", candidate.text,
                    qa=QaResolution(source_id, candidate),
                    alternates=tuple(turn.alternates[1:]))
            return self._append(event.session_id, turn.utterance,
                                "no_answer", self.apology)
        return None

    # --- bookkeeping ---

    def _append(self, session_id: str, utterance: str, resolution: str,
                response_text: str, intent_id=None, qa=None,
                alternates: tuple = ()) -> DialogTurn:
        history = self._sessions.setdefault(session_id, [])
        turn = DialogTurn(
            turn_id=f"{session_id}:{len(history)}",
            session_id=session_id,
            utterance=utterance,
            resolution=resolution,
            response_text=response_text,
            timestamp=datetime.now(timezone.utc).isoformat(),
            intent_id=intent_id,
            qa=qa,
            alternates=alternates,
        )
        history.append(turn)
        self._turns[turn.turn_id] = turn
        return turn

    def session_history(self, session_id: str) -> list[DialogTurn]:
        return list(self._sessions.get(session_id, []))

    def get_turn(self, turn_id: str) -> Optional[DialogTurn]:
        return self._turns.get(turn_id)

    def feedback_log(self) -> list[FeedbackEvent]:
        return list(self._feedback)


def load_intents(path) -> list[ScriptedIntent]:
    """Read the intent config: {"intents": [{id, phrases, responses,
    entities?}, ...]}."""
    doc = json.loads(Path(path).read_text("utf-8"))
    return [
        ScriptedIntent(
            intent_id=entry["id"],
            training_phrases=list(entry["phrases"]),
            responses=list(entry["responses"]),
            required_entities=list(entry.get("entities", [])),
        )
        for entry in doc["intents"]
    ]
