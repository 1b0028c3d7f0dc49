"""Knowledge base maintenance: fetch URLs, strip HTML, persist sources.

The store is a flat directory: one ``<id>.txt`` document per source plus an
``index.json`` with metadata (url, fetch time, content hash, language), so
the knowledge base is diff-able and needs no database. Writes go through a
temp file + rename, so a failed refresh never corrupts the prior snapshot.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from datetime import datetime, timezone
from html.parser import HTMLParser
from pathlib import Path
from typing import Optional
from urllib.parse import urlparse
from urllib.request import url2pathname

import httpx

from .datamodel import LanguageTag
from .errors import FetchFailed, TooLarge, UnsupportedScheme

DEFAULT_MAX_BYTES = 8 * 1024 * 1024
DEFAULT_TIMEOUT = 20.0

# Elements whose entire content is boilerplate, not page text.
_DROP_ELEMENTS = {"script", "style", "head", "nav", "noscript", "template"}

# Elements that end a text block; boundaries become single newlines.
_BLOCK_ELEMENTS = {
    "address", "article", "aside", "blockquote", "body", "br", "caption",
    "dd", "div", "dl", "dt", "fieldset", "figcaption", "figure", "footer",
    "form", "h1", "h2", "h3", "h4", "h5", "h6", "header", "hr", "html",
    "li", "main", "ol", "option", "p", "pre", "section", "select", "table",
    "tbody", "td", "tfoot", "th", "thead", "title", "tr", "ul",
}


class _TextExtractor(HTMLParser):
    """Collects text content, skipping dropped elements, marking block breaks."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.parts: list[str] = []
        self._drop_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in _DROP_ELEMENTS:
            self._drop_depth += 1
        elif tag in _BLOCK_ELEMENTS:
            self.parts.append("\n")

    def handle_endtag(self, tag):
        if tag in _DROP_ELEMENTS:
            self._drop_depth = max(0, self._drop_depth - 1)
        elif tag in _BLOCK_ELEMENTS:
            self.parts.append("\n")

    def handle_startendtag(self, tag, attrs):
        if tag in _BLOCK_ELEMENTS:
            self.parts.append("\n")

    def handle_data(self, data):
        if self._drop_depth == 0:
            self.parts.append(data)


def html_to_text(html: str) -> str:
    """Strip markup to plain text.

    Tags are removed; script/style/head/nav/noscript contents are dropped
    entirely; block boundaries become single newlines; entity references
    are decoded; runs of whitespace collapse. Deterministic, tolerant of
    malformed markup, and idempotent on its own output.
    """
    parser = _TextExtractor()
    parser.feed(html)
    parser.close()
    text = "".join(parser.parts)
    lines = [re.sub(r"[ \t\r\f\v]+", " ", line).strip()
             for line in text.split("\n")]
    return "\n".join(line for line in lines if line)


@dataclass(frozen=True)
class SourceConfig:
    id: str
    url: str
    language: Optional[LanguageTag] = None


@dataclass(frozen=True)
class KnowledgeSource:
    id: str
    url: str
    title: str
    fetched_at: str  # UTC ISO-8601
    content_hash: str  # sha256 hex of the raw fetched bytes
    text: str
    language: Optional[LanguageTag] = None


@dataclass(frozen=True)
class RefreshResult:
    source_id: str
    url: str
    status: str  # updated | unchanged | failed
    detail: str = ""


RefreshReport = list


def fetch_source(url: str, timeout: float = DEFAULT_TIMEOUT,
                 max_bytes: int = DEFAULT_MAX_BYTES) -> tuple[bytes, str]:
    """Fetch a URL body; http(s) for live pages, file:// for offline fixtures."""
    parsed = urlparse(url)
    if parsed.scheme == "file":
        path = Path(url2pathname(parsed.path))
        try:
            body = path.read_bytes()
        except OSError as exc:
            raise FetchFailed(url, str(exc)) from exc
        if len(body) > max_bytes:
            raise TooLarge(f"{url}: {len(body)} bytes > cap {max_bytes}")
        return body, "text/html"
    if parsed.scheme not in ("http", "https"):
        raise UnsupportedScheme(f"unsupported scheme {parsed.scheme!r} in {url}")
    try:
        response = httpx.get(url, timeout=timeout, follow_redirects=True)
    except httpx.HTTPError as exc:
        raise FetchFailed(url, str(exc)) from exc
    if response.status_code >= 400:
        raise FetchFailed(url, f"status {response.status_code}",
                          status=response.status_code)
    body = response.content
    if len(body) > max_bytes:
        raise TooLarge(f"{url}: {len(body)} bytes > cap {max_bytes}")
    content_type = response.headers.get("content-type", "text/html")
    return body, content_type


_TITLE_RE = re.compile(r"<title[^>]*>(.*?)</title>", re.IGNORECASE | re.DOTALL)


def _extract_title(html: str, fallback: str) -> str:
    match = _TITLE_RE.search(html)
    if match:
        title = html_to_text(match.group(1)).strip()
        if title:
            return title
    return fallback


class SourceStore:
    """Directory-backed map of source id -> KnowledgeSource."""

    def __init__(self, root: Path | str):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._index_path = self.root / "index.json"
        self._sources: dict[str, KnowledgeSource] = {}
        self._load()

    def _load(self):
        if not self._index_path.exists():
            return
        index = json.loads(self._index_path.read_text("utf-8"))
        for entry in index["sources"]:
            text_path = self.root / f"{entry['id']}.txt"
            language = (LanguageTag(entry["language"])
                        if entry.get("language") else None)
            self._sources[entry["id"]] = KnowledgeSource(
                id=entry["id"],
                url=entry["url"],
                title=entry["title"],
                fetched_at=entry["fetched_at"],
                content_hash=entry["content_hash"],
                text=text_path.read_text("utf-8"),
                language=language,
            )

    def _persist(self):
        index = {"sources": [
            {
                "id": s.id, "url": s.url, "title": s.title,
                "fetched_at": s.fetched_at, "content_hash": s.content_hash,
                "language": s.language.code if s.language else None,
            }
            for s in sorted(self._sources.values(), key=lambda s: s.id)
        ]}
        for source in self._sources.values():
            _atomic_write(self.root / f"{source.id}.txt", source.text)
        _atomic_write(self._index_path,
                      json.dumps(index, ensure_ascii=False, indent=1) + "\n")

    def get(self, source_id: str) -> Optional[KnowledgeSource]:
        return self._sources.get(source_id)

    def sources(self) -> list[KnowledgeSource]:
        return sorted(self._sources.values(), key=lambda s: s.id)

    def __len__(self) -> int:
        return len(self._sources)

    def put(self, source: KnowledgeSource):
        self._sources[source.id] = source
        self._persist()


def _atomic_write(path: Path, content: str):
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(content, "utf-8")
    tmp.replace(path)


def refresh_store(store: SourceStore, configs: list[SourceConfig],
                  timeout: float = DEFAULT_TIMEOUT,
                  max_bytes: int = DEFAULT_MAX_BYTES) -> RefreshReport:
    """Fetch and strip every configured url; failures leave prior snapshots
    intact and are reported per url, never raised."""
    report: list[RefreshResult] = []
    for config in configs:
        try:
            raw, _ = fetch_source(config.url, timeout=timeout,
                                  max_bytes=max_bytes)
        except Exception as exc:
            report.append(RefreshResult(config.id, config.url, "failed",
                                        str(exc)))
            continue
        content_hash = hashlib.sha256(raw).hexdigest()
        existing = store.get(config.id)
        if existing is not None and existing.content_hash == content_hash:
            report.append(RefreshResult(config.id, config.url, "unchanged"))
            continue
        html = raw.decode("utf-8", errors="replace")
        store.put(KnowledgeSource(
            id=config.id,
            url=config.url,
            title=_extract_title(html, fallback=config.id),
            fetched_at=datetime.now(timezone.utc).isoformat(),
            content_hash=content_hash,
            text=html_to_text(html),
            language=config.language,
        ))
        report.append(RefreshResult(config.id, config.url, "updated"))
    return report


def load_source_configs(path: Path | str) -> list[SourceConfig]:
    """Read the source list config: {"sources": [{id, url, language?}, ...]}."""
    doc = json.loads(Path(path).read_text("utf-8"))
    return [
        SourceConfig(
            id=entry["id"],
            url=entry["url"],
            language=LanguageTag(entry["language"]) if entry.get("language")
            else None,
        )
        for entry in doc["sources"]
    ]
