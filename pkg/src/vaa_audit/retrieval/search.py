"""Web-search backends for Setting A.

The fixture backend reads canned results from disk: every ``*.jsonl`` file
in the fixture directory (or a single ``.jsonl`` file) holds records
``{"pattern": <regex>, "results": [{"title", "url", "snippet"}, ...]}``.
The first record whose pattern matches the query, case-insensitively,
answers it. Records are read in file-name order, then line order.
"""

from __future__ import annotations

import json
import logging
import re
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol

import httpx

from vaa_audit.retrieval.snippets import RetrievedSnippet

logger = logging.getLogger(__name__)

DEFAULT_WEB_LIMIT = 4


class SearchError(RuntimeError):
    """Retryable failure of a search backend."""


@dataclass(frozen=True)
class SearchResult:
    title: str
    url: str
    snippet: str


class SearchBackend(Protocol):
    def search(self, query: str, limit: int) -> list[SearchResult]: ...


class FixtureSearchBackend:
    def __init__(self, path: str | Path):
        root = Path(path)
        files = sorted(root.glob("*.jsonl")) if root.is_dir() else [root]
        self.rules: list[tuple[re.Pattern, list[SearchResult]]] = []
        for f in files:
            for line in f.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                rec = json.loads(line)
                results = [SearchResult(r["title"], r["url"], r["snippet"]) for r in rec.get("results", [])]
                self.rules.append((re.compile(rec.get("pattern", ""), re.IGNORECASE), results))

    def search(self, query, limit):
        for pattern, results in self.rules:
            if pattern.search(query):
                return results[:limit]
        return []


class HTTPSearchBackend:
    """GET ``{url}?q=<query>&limit=<n>`` returning a JSON list of results."""

    def __init__(self, url: str, *, api_key: str | None = None, timeout: float = 30.0, client: httpx.Client | None = None):
        self.url = url
        headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._client = client or httpx.Client(timeout=timeout, headers=headers)

    def search(self, query, limit):
        try:
            resp = self._client.get(self.url, params={"q": query, "limit": limit})
            resp.raise_for_status()
            body = resp.json()
        except (httpx.HTTPError, ValueError) as e:
            raise SearchError(f"search request failed: {e}") from e
        rows = body.get("results", []) if isinstance(body, dict) else body
        return [SearchResult(r.get("title", ""), r.get("url", ""), r.get("snippet", "")) for r in rows]


def web_search(
    backend: SearchBackend,
    query: str,
    limit: int = DEFAULT_WEB_LIMIT,
    *,
    party: str = "",
    retries: int = 2,
    backoff: float = 0.5,
    sleep: Callable[[float], None] = time.sleep,
) -> list[RetrievedSnippet]:
    """Search the web and wrap at most ``limit`` hits as snippets.

    The source of each snippet is ``title (url)``; scores fall with rank.
    :class:`SearchError` is retried ``retries`` times before it propagates.
    """
    for attempt in range(retries + 1):
        try:
            hits = backend.search(query, limit)
            break
        except SearchError as e:
            if attempt == retries:
                raise
            logger.warning("search attempt %d failed: %s", attempt + 1, e)
            sleep(backoff * 2**attempt)
    return [
        RetrievedSnippet(source=f"{h.title} ({h.url})", text=h.snippet, score=1.0 / rank, party=party)
        for rank, h in enumerate(hits[:limit], start=1)
        if h.snippet.strip()
    ]
