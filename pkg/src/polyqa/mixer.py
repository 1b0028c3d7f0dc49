"""Cross-lingual dataset construction.

Pairs the context (and answers, offsets untouched) from one language's
dataset with the question text from another's. Items are matched across
languages by their shared qa item id; a positional fallback keyed on
(article index, paragraph index, question index) is available for corpora
whose translations did not preserve ids.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .datamodel import Article, LanguageTag, Paragraph, QaDataset
from .errors import LanguagesUnavailable, NoOverlap


@dataclass(frozen=True)
class AlignedCorpus:
    """Per-language datasets plus the item-level alignment between them."""

    datasets: dict[str, QaDataset]  # language code -> dataset
    alignment: dict[str, dict[str, str]]  # canonical id -> {language: item id}

    @property
    def languages(self) -> list[LanguageTag]:
        return [d.language for d in self.datasets.values()]

    def coverage(self, *codes: str) -> set[str]:
        """Canonical ids aligned across all of the given languages."""
        return {cid for cid, refs in self.alignment.items()
                if all(code in refs for code in codes)}


@dataclass(frozen=True)
class MixSpec:
    context_language: LanguageTag
    question_language: LanguageTag

    @property
    def is_cross_lingual(self) -> bool:
        return self.context_language.code != self.question_language.code

    @property
    def name(self) -> str:
        return f"{self.context_language.code}-{self.question_language.code}"


def align_datasets(datasets: dict[str, QaDataset],
                   positional: bool = False) -> AlignedCorpus:
    """Align items across languages; an item is aligned iff present in >= 2.

    With positional=True, ids are ignored and items are keyed by their
    (article, paragraph, question) position instead.
    """
    if len(datasets) < 2:
        raise NoOverlap("alignment needs at least two datasets")

    keyed: dict[str, dict[str, str]] = {}
    for code, dataset in datasets.items():
        for key, qa in _iter_keys(dataset, positional):
            keyed.setdefault(key, {})[code] = qa.id

    alignment = {key: refs for key, refs in keyed.items() if len(refs) >= 2}
    if not alignment:
        raise NoOverlap("no item id is shared across datasets")
    return AlignedCorpus(datasets=dict(datasets), alignment=alignment)


def _iter_keys(dataset: QaDataset, positional: bool):
    for ai, article in enumerate(dataset.articles):
        for pi, paragraph in enumerate(article.paragraphs):
            for qi, qa in enumerate(paragraph.qas):
                key = f"{ai}/{pi}/{qi}" if positional else qa.id
                yield key, qa


def mix_pair(corpus: AlignedCorpus, spec: MixSpec) -> QaDataset:
    """Dataset with contexts/answers from one language, questions from another.

    Contexts, answers and answer offsets are copied unchanged from the
    context-language dataset; only the question text is swapped in, and the
    per-item language override is set to the question language. Items not
    aligned in both languages are dropped (intersection semantics).
    """
    ctx_code = spec.context_language.code
    q_code = spec.question_language.code
    missing = [c for c in (ctx_code, q_code) if c not in corpus.datasets]
    if missing:
        raise LanguagesUnavailable(f"not in corpus: {', '.join(missing)}")

    # context-language item id -> question text in the question language
    q_by_id = {qa.id: qa.question
               for _, _, qa in corpus.datasets[q_code].items()}
    questions = {refs[ctx_code]: q_by_id[refs[q_code]]
                 for refs in corpus.alignment.values()
                 if ctx_code in refs and q_code in refs}

    ctx_dataset = corpus.datasets[ctx_code]
    articles = []
    for article in ctx_dataset.articles:
        paragraphs = []
        for paragraph in article.paragraphs:
            qas = tuple(
                replace(qa, question=questions[qa.id],
                        language=spec.question_language)
                for qa in paragraph.qas if qa.id in questions)
            if qas:
                paragraphs.append(Paragraph(context=paragraph.context, qas=qas))
        if paragraphs:
            articles.append(Article(title=article.title,
                                    paragraphs=tuple(paragraphs)))

    return QaDataset(version=ctx_dataset.version, articles=tuple(articles),
                     language=spec.context_language)


def mix_grid(corpus: AlignedCorpus) -> dict[MixSpec, QaDataset]:
    """All |L|^2 context-language x question-language combinations."""
    codes = sorted(corpus.datasets)
    grid = {}
    for ctx in codes:
        for q in codes:
            spec = MixSpec(context_language=corpus.datasets[ctx].language,
                           question_language=corpus.datasets[q].language)
            grid[spec] = mix_pair(corpus, spec)
    return grid
