"""Question-answering dataset model in the SQuAD v1.1 interchange layout.

Character offsets are always counted in Unicode scalar values (Python ``str``
indices), never bytes, so spans stay valid across languages and round-trips.

Two namespaced extensions to the stock layout are accepted and emitted:

* ``x_language`` (top level) — context language of the whole file.
* ``x_question_language`` (per qa item) — overrides the question language,
  used by mixed cross-lingual files where context and question differ.

SQuAD-2.0-style unanswerable items (``is_impossible`` true, empty answer
list) are accepted on parse and flagged; v1.1 items must carry answers.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace

from .errors import EncodingError, InvalidDataset, MalformedInput

_LANG_CODE_RE = re.compile(r"^[a-z]{2,3}(-[a-z0-9]+)*$")

# Languages written without word-delimiting whitespace.
_CHARACTER_DELIMITED = {"ja", "zh", "th"}

WHITESPACE_DELIMITED = "whitespace-delimited"
CHARACTER_DELIMITED = "character-delimited"


@dataclass(frozen=True)
class LanguageTag:
    """BCP-47-style lowercase language code plus its script delimitation class."""

    code: str
    script_class: str = ""

    def __post_init__(self):
        if not _LANG_CODE_RE.match(self.code):
            raise ValueError(f"invalid language code: {self.code!r}")
        if not self.script_class:
            primary = self.code.split("-")[0]
            cls = (CHARACTER_DELIMITED if primary in _CHARACTER_DELIMITED
                   else WHITESPACE_DELIMITED)
            object.__setattr__(self, "script_class", cls)
        elif self.script_class not in (WHITESPACE_DELIMITED, CHARACTER_DELIMITED):
            raise ValueError(f"invalid script class: {self.script_class!r}")


@dataclass(frozen=True)
class GroundTruthAnswer:
    text: str
    answer_start: int


@dataclass(frozen=True)
class QaItem:
    id: str
    question: str
    answers: tuple[GroundTruthAnswer, ...]
    language: LanguageTag
    unanswerable: bool = False


@dataclass(frozen=True)
class Paragraph:
    context: str
    qas: tuple[QaItem, ...]


@dataclass(frozen=True)
class Article:
    title: str
    paragraphs: tuple[Paragraph, ...]


@dataclass(frozen=True)
class QaDataset:
    """Immutable article/paragraph/qa tree; `language` is the context language."""

    version: str
    articles: tuple[Article, ...]
    language: LanguageTag

    def items(self):
        """Yield (article, paragraph, qa_item) triples in document order."""
        for article in self.articles:
            for paragraph in article.paragraphs:
                for qa in paragraph.qas:
                    yield article, paragraph, qa

    def item_ids(self) -> set[str]:
        return {qa.id for _, _, qa in self.items()}

    def n_items(self) -> int:
        return sum(1 for _ in self.items())


@dataclass(frozen=True)
class Violation:
    kind: str  # DuplicateId | SpanMismatch | OffsetOutOfRange | EmptyContext | ...
    item_id: str
    detail: str


ValidationReport = list


def _require(node, key, path):
    if not isinstance(node, dict) or key not in node:
        raise MalformedInput(path, f"missing required field {key!r}")
    return node[key]


def _require_str(node, key, path, allow_empty=False):
    value = _require(node, key, path)
    if not isinstance(value, str):
        raise MalformedInput(f"{path}.{key}", "expected a string")
    if not value and not allow_empty:
        raise MalformedInput(f"{path}.{key}", "must be non-empty")
    return value


def _require_list(node, key, path):
    value = _require(node, key, path)
    if not isinstance(value, list):
        raise MalformedInput(f"{path}.{key}", "expected a list")
    return value


def parse_dataset(raw: bytes, default_language: LanguageTag) -> QaDataset:
    """Parse SQuAD v1.1 interchange bytes into a QaDataset.

    Never crashes on arbitrary input: raises EncodingError for non-UTF-8
    bytes and MalformedInput (with the path to the offending node) for any
    structural violation.
    """
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EncodingError(f"input is not valid UTF-8: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput("$", f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedInput("$", "top level must be an object")

    language = default_language
    if "x_language" in doc:
        try:
            language = LanguageTag(doc["x_language"])
        except (ValueError, TypeError) as exc:
            raise MalformedInput("$.x_language", str(exc)) from exc

    version = doc.get("version", "")
    if not isinstance(version, str):
        raise MalformedInput("$.version", "expected a string")

    articles = []
    for ai, raw_article in enumerate(_require_list(doc, "data", "$")):
        apath = f"$.data[{ai}]"
        title = _require_str(raw_article, "title", apath)
        paragraphs = []
        for pi, raw_para in enumerate(_require_list(raw_article, "paragraphs", apath)):
            ppath = f"{apath}.paragraphs[{pi}]"
            context = _require_str(raw_para, "context", ppath)
            qas = []
            for qi, raw_qa in enumerate(_require_list(raw_para, "qas", ppath)):
                qpath = f"{ppath}.qas[{qi}]"
                qas.append(_parse_qa(raw_qa, qpath, language))
            paragraphs.append(Paragraph(context=context, qas=tuple(qas)))
        articles.append(Article(title=title, paragraphs=tuple(paragraphs)))

    return QaDataset(version=version, articles=tuple(articles), language=language)


def _parse_qa(raw_qa: dict, path: str, default_language: LanguageTag) -> QaItem:
    qa_id = _require_str(raw_qa, "id", path)
    question = _require_str(raw_qa, "question", path)
    unanswerable = bool(raw_qa.get("is_impossible", False))

    language = default_language
    if "x_question_language" in raw_qa:
        try:
            language = LanguageTag(raw_qa["x_question_language"])
        except (ValueError, TypeError) as exc:
            raise MalformedInput(f"{path}.x_question_language", str(exc)) from exc

    answers = []
    raw_answers = _require_list(raw_qa, "answers", path)
    if not raw_answers and not unanswerable:
        raise MalformedInput(f"{path}.answers", "must be non-empty for answerable items")
    for i, raw_ans in enumerate(raw_answers):
        apath = f"{path}.answers[{i}]"
        text = _require_str(raw_ans, "text", apath)
        start = _require(raw_ans, "answer_start", apath)
        if not isinstance(start, int) or isinstance(start, bool) or start < 0:
            raise MalformedInput(f"{apath}.answer_start",
                                 "must be a non-negative integer character offset")
        answers.append(GroundTruthAnswer(text=text, answer_start=start))

    return QaItem(id=qa_id, question=question, answers=tuple(answers),
                  language=language, unanswerable=unanswerable)


def validate_dataset(dataset: QaDataset) -> ValidationReport:
    """Report every invariant violation; an empty report means valid.

    Validation never aborts: all violations are collected.
    """
    report: list[Violation] = []
    seen_ids: set[str] = set()
    for article, paragraph, qa in dataset.items():
        if qa.id in seen_ids:
            report.append(Violation("DuplicateId", qa.id, "id occurs more than once"))
        seen_ids.add(qa.id)
        if not paragraph.context:
            report.append(Violation("EmptyContext", qa.id, "owning context is empty"))
            continue
        if not qa.answers and not qa.unanswerable:
            report.append(Violation("NoAnswers", qa.id,
                                    "answerable item has no ground-truth answers"))
        for answer in qa.answers:
            end = answer.answer_start + len(answer.text)
            if answer.answer_start < 0 or end > len(paragraph.context):
                report.append(Violation(
                    "OffsetOutOfRange", qa.id,
                    f"[{answer.answer_start}, {end}) outside context of "
                    f"length {len(paragraph.context)}"))
                continue
            actual = paragraph.context[answer.answer_start:end]
            if actual != answer.text:
                report.append(Violation(
                    "SpanMismatch", qa.id,
                    f"context slice {actual!r} != answer text {answer.text!r}"))
    return report


def serialize_dataset(dataset: QaDataset) -> bytes:
    """Serialize to canonical UTF-8 bytes; round-trips through parse_dataset.

    Requires a valid dataset (empty validation report). Output is
    deterministic: same dataset, same bytes.
    """
    violations = validate_dataset(dataset)
    if violations:
        raise InvalidDataset(
            f"{len(violations)} violation(s), first: {violations[0]}")
    doc = {
        "version": dataset.version,
        "x_language": dataset.language.code,
        "data": [
            {
                "title": article.title,
                "paragraphs": [
                    {
                        "context": paragraph.context,
                        "qas": [_qa_to_json(qa, dataset.language)
                                for qa in paragraph.qas],
                    }
                    for paragraph in article.paragraphs
                ],
            }
            for article in dataset.articles
        ],
    }
    return (json.dumps(doc, ensure_ascii=False, indent=1) + "\n").encode("utf-8")


def _qa_to_json(qa: QaItem, dataset_language: LanguageTag) -> dict:
    out = {
        "id": qa.id,
        "question": qa.question,
        "answers": [{"text": a.text, "answer_start": a.answer_start}
                    for a in qa.answers],
    }
    if qa.language != dataset_language:
        out["x_question_language"] = qa.language.code
    if qa.unanswerable:
        out["is_impossible"] = True
    return out


def with_language(dataset: QaDataset, language: LanguageTag) -> QaDataset:
    """Copy of the dataset with a different context-language tag."""
    return replace(dataset, language=language)
