"""Grid reporting for cross-lingual evaluation runs.

A grid is a languages x languages table of EM/F1 cells: rows are the
context language, columns the question language. The renderer emits a
plain-text table, a machine-readable TSV, and (optionally) heatmap figures
rendered to image files. A cell is flagged as "best" when its EM is the
maximum among all cells involving at least one of its two languages.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import MissingCell
from .metrics import EvalScores


@dataclass(frozen=True)
class GridCell:
    context_language: str
    question_language: str
    scores: EvalScores

    @property
    def name(self) -> str:
        return f"{self.context_language}-{self.question_language}"


def write_cell_scores(path: Path, cell: GridCell, items=None) -> None:
    """Persist one grid cell's scores (and optional per-item breakdown)
    deterministically: identical inputs give identical bytes."""
    doc = {
        "context_language": cell.context_language,
        "question_language": cell.question_language,
        "em": cell.scores.em,
        "f1": cell.scores.f1,
        "n_items": cell.scores.n_items,
    }
    if items is not None:
        doc["items"] = [
            {"id": s.item_id, "em": s.em, "f1": s.f1,
             "prediction": s.prediction}
            for s in items
        ]
    path.write_text(json.dumps(doc, ensure_ascii=False, indent=1,
                               sort_keys=True) + "\n", "utf-8")


def read_cell_scores(path: Path) -> GridCell:
    doc = json.loads(Path(path).read_text("utf-8"))
    return GridCell(
        context_language=doc["context_language"],
        question_language=doc["question_language"],
        scores=EvalScores(em=doc["em"], f1=doc["f1"], n_items=doc["n_items"]),
    )


@dataclass(frozen=True)
class Grid:
    context_languages: list[str]  # row order
    question_languages: list[str]  # column order
    cells: dict[tuple[str, str], GridCell]


def build_grid(cells: list[GridCell]) -> Grid:
    """Arrange cells into a complete table; every (row, column) must exist."""
    rows = sorted({c.context_language for c in cells})
    cols = sorted({c.question_language for c in cells})
    by_key = {(c.context_language, c.question_language): c for c in cells}
    for row in rows:
        for col in cols:
            if (row, col) not in by_key:
                raise MissingCell(f"no scores for context={row} question={col}")
    return Grid(context_languages=rows, question_languages=cols, cells=by_key)


def best_em_flags(grid: Grid) -> set[tuple[str, str]]:
    """Cells whose EM is the best for at least one of their languages,
    among all cells where that language occurs (as row or column)."""
    languages = set(grid.context_languages) | set(grid.question_languages)
    best: dict[str, float] = {}
    for lang in languages:
        involved = [c.scores.em for key, c in grid.cells.items()
                    if lang in key]
        best[lang] = max(involved)
    return {key for key, cell in grid.cells.items()
            if any(cell.scores.em == best[lang] for lang in key)}


def render_text(grid: Grid) -> str:
    """Fixed-width table: one F1/EM pair per cell, '*' marking best EM."""
    flags = best_em_flags(grid)
    width = 16
    header = "context\\question".ljust(width) + "".join(
        col.ljust(width) for col in grid.question_languages)
    lines = [header]
    for row in grid.context_languages:
        cells = []
        for col in grid.question_languages:
            cell = grid.cells[(row, col)]
            mark = "*" if (row, col) in flags else ""
            cells.append(f"{cell.scores.f1:.2f}/{cell.scores.em:.2f}{mark}"
                         .ljust(width))
        lines.append(row.ljust(width) + "".join(cells))
    return "\n".join(lines) + "\n"


def render_tsv(grid: Grid) -> str:
    """Delimited long-form table, one cell per line, re-parsable."""
    flags = best_em_flags(grid)
    lines = ["context_language\tquestion_language\tf1\tem\tn_items\tbest_em"]
    for row in grid.context_languages:
        for col in grid.question_languages:
            cell = grid.cells[(row, col)]
            flag = "1" if (row, col) in flags else "0"
            lines.append(f"{row}\t{col}\t{cell.scores.f1!r}\t"
                         f"{cell.scores.em!r}\t{cell.scores.n_items}\t{flag}")
    return "\n".join(lines) + "\n"


def parse_tsv(text: str) -> Grid:
    cells = []
    lines = text.strip().split("\n")
    for line in lines[1:]:
        row, col, f1, em, n_items, _ = line.split("\t")
        cells.append(GridCell(row, col, EvalScores(
            em=float(em), f1=float(f1), n_items=int(n_items))))
    return build_grid(cells)


def render_figures(grid: Grid, output_dir: Path) -> list[Path]:
    """Render EM and F1 heatmaps to PNG files; returns the written paths."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    written = []
    for metric in ("f1", "em"):
        values = [[getattr(grid.cells[(row, col)].scores, metric)
                   for col in grid.question_languages]
                  for row in grid.context_languages]
        fig, ax = plt.subplots(figsize=(1.6 + 1.2 * len(grid.question_languages),
                                        1.2 + 1.0 * len(grid.context_languages)))
        image = ax.imshow(values, cmap="viridis", vmin=0, vmax=100)
        ax.set_xticks(range(len(grid.question_languages)),
                      grid.question_languages)
        ax.set_yticks(range(len(grid.context_languages)),
                      grid.context_languages)
        ax.set_xlabel("question language")
        ax.set_ylabel("context language")
        ax.set_title(metric.upper())
        for i, row_values in enumerate(values):
            for j, value in enumerate(row_values):
                ax.text(j, i, f"{value:.2f}", ha="center", va="center",
                        color="white", fontsize=9)
        fig.colorbar(image, ax=ax, shrink=0.8)
        fig.tight_layout()
        path = output_dir / f"grid_{metric}.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written
