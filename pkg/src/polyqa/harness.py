"""Experiment harness: mix grids, collect predictions, score, report.

The workflow mirrors the reporting layout of cross-lingual evaluation:
one dataset file per (context language, question language) cell, one
scores file per evaluated cell, and a languages x languages grid table.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .datamodel import (LanguageTag, QaDataset, parse_dataset,
                        serialize_dataset, validate_dataset)
from .errors import InvalidDataset
from .extractor import ExtractionRequest, Extractor, extract_over_chunks
from .metrics import (EvalScores, ItemScore, default_profile,
                      evaluate_dataset_items)
from .mixer import MixSpec, align_datasets, mix_grid
from .report import GridCell, write_cell_scores


@dataclass(frozen=True)
class EvalRunSpec:
    dataset_paths: list[Path]
    extractor: Extractor
    window: int = 384
    stride: int = 128
    output_dir: Optional[Path] = None
    self_prediction: bool = False
    default_language: LanguageTag = field(
        default_factory=lambda: LanguageTag("en"))


@dataclass(frozen=True)
class MixRunReport:
    aligned: int
    dropped_per_language: dict[str, int]
    written: list[Path]


def load_and_check(path: Path, default_language: LanguageTag) -> QaDataset:
    dataset = parse_dataset(Path(path).read_bytes(), default_language)
    violations = validate_dataset(dataset)
    if violations:
        raise InvalidDataset(f"{path}: {len(violations)} violation(s), "
                             f"first: {violations[0]}")
    return dataset


def run_mix(inputs: dict[str, Path], output_dir: Path) -> MixRunReport:
    """Build the full cross-lingual grid from per-language dataset files.

    Writes one `<ctx>-<q>.json` file per grid cell and reports how many
    items aligned and how many each input lost to the intersection.
    """
    datasets = {code: load_and_check(path, LanguageTag(code))
                for code, path in inputs.items()}
    corpus = align_datasets(datasets)
    grid = mix_grid(corpus)
    output_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for spec, dataset in sorted(grid.items(), key=lambda kv: kv[0].name):
        path = output_dir / f"{spec.name}.json"
        path.write_bytes(serialize_dataset(dataset))
        written.append(path)
    dropped = {code: dataset.n_items() - len(corpus.coverage(code))
               for code, dataset in datasets.items()}
    return MixRunReport(aligned=len(corpus.alignment),
                        dropped_per_language=dropped, written=written)


def predict_dataset(dataset: QaDataset, extractor: Extractor,
                    window: int, stride: int,
                    self_prediction: bool = False) -> dict[str, str]:
    """Top-1 candidate text per item ("" when the extractor abstains).

    Self-prediction mode short-circuits the extractor and predicts the
    first ground truth, validating the whole metric path end to end.
    """
    predictions: dict[str, str] = {}
    for _, paragraph, qa in dataset.items():
        if self_prediction:
            predictions[qa.id] = qa.answers[0].text if qa.answers else ""
            continue
        request = ExtractionRequest(
            question=qa.question,
            context=paragraph.context,
            max_candidates=1,
            language_hint=dataset.language,
        )
        candidates = extract_over_chunks(extractor, request,
                                         window=window, stride=stride)
        predictions[qa.id] = candidates[0].text if candidates else ""
    return predictions


def question_language(dataset: QaDataset) -> LanguageTag:
    """Question language of a (possibly mixed) dataset: the per-item
    override when present, the context language otherwise."""
    for _, _, qa in dataset.items():
        return qa.language
    return dataset.language


def run_evaluation(spec: EvalRunSpec) -> list[tuple[GridCell, list[ItemScore]]]:
    """Evaluate every dataset file; optionally write one scores file per
    cell (deterministic bytes) into the output directory."""
    results = []
    for path in spec.dataset_paths:
        dataset = load_and_check(Path(path), spec.default_language)
        predictions = predict_dataset(dataset, spec.extractor,
                                      spec.window, spec.stride,
                                      self_prediction=spec.self_prediction)
        scores, items = evaluate_dataset_items(dataset, predictions,
                                               default_profile)
        cell = GridCell(
            context_language=dataset.language.code,
            question_language=question_language(dataset).code,
            scores=scores,
        )
        results.append((cell, items))
    if spec.output_dir is not None:
        spec.output_dir.mkdir(parents=True, exist_ok=True)
        for cell, items in results:
            write_cell_scores(spec.output_dir / f"{cell.name}.scores.json",
                              cell, items)
    return results
