"""Command-line entry point: load a checkpoint and serve /extract."""

from __future__ import annotations

import click
import uvicorn

from .model import SidecarConfig, TransformerSpanScorer
from .server import create_app


@click.command()
@click.option("--model-id", required=True,
              help="Checkpoint id or local path of a question-answering "
                   "model (e.g. a multilingual cased model fine-tuned on "
                   "an English extractive QA training set).")
@click.option("--device", default="cpu", show_default=True,
              help="Inference device (cpu, cuda, cuda:0, ...).")
@click.option("--max-seq-len", default=384, show_default=True, type=int,
              help="Maximum tokenized length per request; must be at least "
                   "the window size used by the calling chunker.")
@click.option("--batch-size", default=8, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8600, show_default=True, type=int)
def main(model_id: str, device: str, max_seq_len: int, batch_size: int,
         host: str, port: int):
    """Serve span extraction over HTTP (POST /extract)."""
    config = SidecarConfig(model_id=model_id, device=device,
                           max_seq_len=max_seq_len, batch_size=batch_size)
    scorer = TransformerSpanScorer(config)
    uvicorn.run(create_app(scorer), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
