"""Span extraction server backed by a transformer question-answering model.

Serves ``POST /extract`` with the same request/response shapes as the
platform's extractor wire protocol, so it can be dropped in wherever a
baseline extractor endpoint is configured.
"""

from .model import SidecarConfig, SpanCandidate, decode_spans
from .server import create_app

__all__ = ["SidecarConfig", "SpanCandidate", "decode_spans", "create_app"]
