"""Wire-protocol conformance checks for extractor servers.

Exercises both directions of the contract: well-formed requests must yield
spans that slice-check against the submitted context, and malformed
requests must be rejected with status 422.
"""

from __future__ import annotations

from dataclasses import dataclass

import httpx

from .datamodel import LanguageTag
from .errors import PolyqaError
from .extractor import ExtractionRequest, ExtractorEndpoint, remote_extract

_CONTEXT = ("The office in Lyon opened in 2004. It hosts the payments "
            "research team. More than 3000 people work for the company "
            "in France.")
_QUESTION = "How many people work for the company in France?"


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _check(name, fn) -> CheckResult:
    try:
        fn()
        return CheckResult(name, True)
    except (PolyqaError, AssertionError, httpx.HTTPError) as exc:
        return CheckResult(name, False, f"{type(exc).__name__}: {exc}")


def run_conformance(base_url: str, timeout: float = 10.0) -> list[CheckResult]:
    endpoint = ExtractorEndpoint(base_url=base_url, timeout=timeout)
    url = base_url.rstrip("/") + "/extract"

    def valid_request():
        request = ExtractionRequest(question=_QUESTION, context=_CONTEXT,
                                    max_candidates=3,
                                    language_hint=LanguageTag("en"))
        candidates = remote_extract(endpoint, request)
        # remote_extract slice-checks every span; here we only require the
        # ranking contract on top of that.
        scores = [c.score for c in candidates]
        assert scores == sorted(scores, reverse=True), "candidates not ranked"
        assert len(candidates) <= 3, "more candidates than requested"

    def unicode_offsets():
        context = "東京都の本社には、三千人以上の社員が働いています。"
        request = ExtractionRequest(question="何人の社員が働いていますか",
                                    context=context, max_candidates=2,
                                    language_hint=LanguageTag("ja"))
        remote_extract(endpoint, request)  # slice check = scalar offsets

    def rejects_empty_question():
        response = httpx.post(url, json={"question": "", "context": "x",
                                         "max_candidates": 1},
                              timeout=timeout)
        assert response.status_code == 422, \
            f"expected 422, got {response.status_code}"

    def rejects_bad_max_candidates():
        response = httpx.post(url, json={"question": "q", "context": "x",
                                         "max_candidates": 0},
                              timeout=timeout)
        assert response.status_code == 422, \
            f"expected 422, got {response.status_code}"

    def rejects_missing_field():
        response = httpx.post(url, json={"question": "q"}, timeout=timeout)
        assert response.status_code == 422, \
            f"expected 422, got {response.status_code}"

    return [
        _check("valid request returns ranked slice-valid spans", valid_request),
        _check("offsets are unicode scalar values", unicode_offsets),
        _check("empty question rejected with 422", rejects_empty_question),
        _check("max_candidates < 1 rejected with 422", rejects_bad_max_candidates),
        _check("missing context rejected with 422", rejects_missing_field),
    ]
