"""Exact Match and token-overlap F1 with language-aware normalization.

Semantics follow the official SQuAD v1.1 evaluator for English, generalized
behind per-language normalization profiles: French splits elisions on
apostrophes and removes determiners, Japanese (and other scripts written
without word spaces) tokenizes per character with no stopword removal.
"""

from __future__ import annotations

import unicodedata
from collections import Counter
from dataclasses import dataclass

from .datamodel import CHARACTER_DELIMITED, LanguageTag, QaDataset
from .errors import EmptyGroundTruths, InvalidDataset, MissingPredictions

WHITESPACE = "whitespace"
PER_CHARACTER = "per-character"

_APOSTROPHES = "'’ʼ"


@dataclass(frozen=True)
class NormalizationProfile:
    """Pipeline settings applied before comparing answers.

    Order of application: lowercase, elision split, punctuation removal,
    tokenization, stopword removal. Per-character tokenization forbids
    stopwords (single characters are not articles).
    """

    language: LanguageTag
    lowercase: bool = True
    strip_punctuation: bool = True
    split_elisions: bool = False
    article_stopwords: frozenset[str] = frozenset()
    tokenization: str = WHITESPACE

    def __post_init__(self):
        if self.tokenization not in (WHITESPACE, PER_CHARACTER):
            raise ValueError(f"invalid tokenization: {self.tokenization!r}")
        if self.tokenization == PER_CHARACTER and self.article_stopwords:
            raise ValueError("per-character tokenization forbids stopwords")


ENGLISH_PROFILE = NormalizationProfile(
    language=LanguageTag("en"),
    article_stopwords=frozenset({"a", "an", "the"}),
)

FRENCH_PROFILE = NormalizationProfile(
    language=LanguageTag("fr"),
    split_elisions=True,
    article_stopwords=frozenset(
        {"le", "la", "les", "l", "un", "une", "des", "du", "de"}),
)

JAPANESE_PROFILE = NormalizationProfile(
    language=LanguageTag("ja"),
    tokenization=PER_CHARACTER,
)

_BUILTIN_PROFILES = {
    "en": ENGLISH_PROFILE,
    "fr": FRENCH_PROFILE,
    "ja": JAPANESE_PROFILE,
    "jap": JAPANESE_PROFILE,
}


def default_profile(language: LanguageTag) -> NormalizationProfile:
    """Built-in profile for the language, or a script-class-based fallback."""
    profile = _BUILTIN_PROFILES.get(language.code.split("-")[0])
    if profile is not None:
        return profile
    if language.script_class == CHARACTER_DELIMITED:
        return NormalizationProfile(language=language, tokenization=PER_CHARACTER)
    return NormalizationProfile(language=language)


def _is_punctuation(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def normalize_answer(text: str, profile: NormalizationProfile) -> list[str]:
    """Normalize text to a token list per the profile; deterministic, total."""
    if profile.lowercase:
        text = text.lower()
    if profile.split_elisions:
        for apostrophe in _APOSTROPHES:
            text = text.replace(apostrophe, " ")
    if profile.strip_punctuation:
        text = "".join(ch for ch in text if not _is_punctuation(ch))
    if profile.tokenization == PER_CHARACTER:
        tokens = [ch for ch in text if not ch.isspace()]
    else:
        tokens = text.split()
    if profile.article_stopwords:
        tokens = [t for t in tokens if t not in profile.article_stopwords]
    return tokens


def exact_match(prediction: str, ground_truths: list[str],
                profile: NormalizationProfile) -> int:
    """1 iff the normalized prediction equals any normalized ground truth."""
    if not ground_truths:
        raise EmptyGroundTruths("exact_match needs at least one ground truth")
    predicted = normalize_answer(prediction, profile)
    return int(any(predicted == normalize_answer(gt, profile)
                   for gt in ground_truths))


def f1_score(prediction: str, ground_truths: list[str],
             profile: NormalizationProfile) -> float:
    """Max over ground truths of the bag-of-tokens F1 overlap, in [0, 1]."""
    if not ground_truths:
        raise EmptyGroundTruths("f1_score needs at least one ground truth")
    predicted = normalize_answer(prediction, profile)
    return max(_token_f1(predicted, normalize_answer(gt, profile))
               for gt in ground_truths)


def _token_f1(predicted: list[str], truth: list[str]) -> float:
    if not predicted and not truth:
        return 1.0
    if not predicted or not truth:
        return 0.0
    common = sum((Counter(predicted) & Counter(truth)).values())
    if common == 0:
        return 0.0
    precision = common / len(predicted)
    recall = common / len(truth)
    return 2 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class EvalScores:
    em: float  # percentage in [0, 100]
    f1: float  # percentage in [0, 100]
    n_items: int


@dataclass(frozen=True)
class ItemScore:
    item_id: str
    em: int
    f1: float
    prediction: str


def evaluate_dataset(dataset: QaDataset, predictions: dict[str, str],
                     profile_resolver=default_profile) -> EvalScores:
    scores, _ = evaluate_dataset_items(dataset, predictions, profile_resolver)
    return scores


def evaluate_dataset_items(dataset: QaDataset, predictions: dict[str, str],
                           profile_resolver=default_profile,
                           ) -> tuple[EvalScores, list[ItemScore]]:
    """Aggregate EM/F1 (percentages) plus the per-item breakdown.

    The normalization profile is resolved from the CONTEXT language of the
    dataset: the answer span lives in the context, so scoring follows its
    language even for cross-lingual items.
    """
    ids = dataset.item_ids()
    missing = ids - predictions.keys()
    if missing:
        raise MissingPredictions(missing)
    profile = profile_resolver(dataset.language)

    items: list[ItemScore] = []
    for _, _, qa in dataset.items():
        truths = [a.text for a in qa.answers]
        prediction = predictions[qa.id]
        items.append(ItemScore(
            item_id=qa.id,
            em=exact_match(prediction, truths, profile),
            f1=f1_score(prediction, truths, profile),
            prediction=prediction,
        ))
    n = len(items)
    if n == 0:
        raise InvalidDataset("cannot evaluate an empty dataset")
    scores = EvalScores(
        em=100.0 * sum(s.em for s in items) / n,
        f1=100.0 * sum(s.f1 for s in items) / n,
        n_items=n,
    )
    return scores, items
