"""Command-line interface: mix, evaluate, report, ingest, serve."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .datamodel import LanguageTag
from .errors import PolyqaError
from .harness import EvalRunSpec, run_evaluation, run_mix
from .report import build_grid, read_cell_scores, render_figures, render_text, render_tsv
from .service import create_app, create_extract_app, load_config, make_extractor


@click.group()
def main():
    """Multilingual extractive-QA platform and evaluation toolchain."""


def _fail(exc: Exception):
    click.echo(f"error\t{type(exc).__name__}\t{exc}", err=True)
    sys.exit(1)


@main.command()
@click.option("--input", "inputs", multiple=True, required=True,
              metavar="LANG=PATH",
              help="Per-language dataset file, e.g. en=en.json (repeatable).")
@click.option("--output-dir", type=click.Path(path_type=Path), required=True)
def mix(inputs, output_dir):
    """Build the cross-lingual dataset grid from aligned per-language files."""
    parsed = {}
    for spec in inputs:
        code, _, path = spec.partition("=")
        if not path:
            _fail(ValueError(f"--input must be LANG=PATH, got {spec!r}"))
        parsed[code] = Path(path)
    try:
        report = run_mix(parsed, output_dir)
    except PolyqaError as exc:
        _fail(exc)
    click.echo(f"aligned items: {report.aligned}")
    for code, dropped in sorted(report.dropped_per_language.items()):
        click.echo(f"dropped from {code}: {dropped}")
    for path in report.written:
        click.echo(f"wrote {path}")


@main.command()
@click.argument("datasets", nargs=-1, required=True,
                type=click.Path(exists=True, path_type=Path))
@click.option("--extractor", default="baseline", show_default=True,
              help='"baseline" or an extractor endpoint base url.')
@click.option("--window", default=384, show_default=True)
@click.option("--stride", default=128, show_default=True)
@click.option("--output-dir", type=click.Path(path_type=Path), default=None,
              help="Write one <ctx>-<q>.scores.json per dataset.")
@click.option("--self-prediction", is_flag=True,
              help="Predict the first ground truth (metric-path sanity mode).")
@click.option("--language", default="en", show_default=True,
              help="Default language for files without an x_language tag.")
def evaluate(datasets, extractor, window, stride, output_dir,
             self_prediction, language):
    """Collect predictions for dataset files and score them (EM/F1)."""
    spec = EvalRunSpec(
        dataset_paths=list(datasets),
        extractor=make_extractor(extractor),
        window=window,
        stride=stride,
        output_dir=output_dir,
        self_prediction=self_prediction,
        default_language=LanguageTag(language),
    )
    try:
        results = run_evaluation(spec)
    except PolyqaError as exc:
        _fail(exc)
    for cell, _ in results:
        click.echo(f"{cell.name}\tF1={cell.scores.f1:.2f}\t"
                   f"EM={cell.scores.em:.2f}\tn={cell.scores.n_items}")


@main.command()
@click.argument("score_files", nargs=-1, required=True,
                type=click.Path(exists=True, path_type=Path))
@click.option("--output-dir", type=click.Path(path_type=Path), default=None,
              help="Also write grid.txt, grid.tsv and heatmap figures here.")
@click.option("--figures/--no-figures", default=True, show_default=True)
def report(score_files, output_dir, figures):
    """Render the languages x languages grid from per-cell score files."""
    try:
        grid = build_grid([read_cell_scores(path) for path in score_files])
    except PolyqaError as exc:
        _fail(exc)
    text = render_text(grid)
    click.echo(text, nl=False)
    if output_dir is not None:
        output_dir.mkdir(parents=True, exist_ok=True)
        (output_dir / "grid.txt").write_text(text, "utf-8")
        (output_dir / "grid.tsv").write_text(render_tsv(grid), "utf-8")
        if figures:
            for path in render_figures(grid, output_dir):
                click.echo(f"wrote {path}")


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, path_type=Path))
def ingest(config_path):
    """Fetch and strip every configured source into the knowledge store."""
    from .ingestion import SourceStore, refresh_store

    config = load_config(config_path)
    store = SourceStore(config.store_dir)
    results = refresh_store(store, config.sources)
    failed = 0
    for result in results:
        click.echo(f"{result.source_id}\t{result.status}\t{result.detail}")
        failed += result.status == "failed"
    if failed:
        _fail(PolyqaError(f"{failed} source(s) failed to refresh"))


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, path_type=Path))
def serve(config_path):
    """Run the chat/QA HTTP service."""
    import uvicorn

    config = load_config(config_path)
    app = create_app(config)
    uvicorn.run(app, host=config.listen_host, port=config.listen_port)


@main.command("serve-extractor")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8090, show_default=True)
def serve_extractor(host, port):
    """Serve the baseline extractor over the wire protocol (POST /extract)."""
    import uvicorn

    uvicorn.run(create_extract_app(), host=host, port=port)


@main.command()
@click.option("--endpoint", required=True,
              help="Extractor server base url, e.g. http://127.0.0.1:8090")
def conformance(endpoint):
    """Run the wire-protocol conformance suite against an extractor server."""
    from .conformance import run_conformance

    results = run_conformance(endpoint)
    failed = 0
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        click.echo(f"{status}\t{result.name}\t{result.detail}".rstrip())
        failed += not result.passed
    if failed:
        _fail(PolyqaError(f"{failed} conformance check(s) failed"))


if __name__ == "__main__":
    main()
