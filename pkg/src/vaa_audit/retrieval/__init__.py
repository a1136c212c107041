"""Curated manifesto retrieval and web-search context for Setting A."""

from vaa_audit.retrieval.corpus import CorpusParagraph, load_corpus, split_manifesto
from vaa_audit.retrieval.index import (
    EmbeddingBackend,
    Index,
    IndexBuildError,
    LexicalBackend,
    build_index,
    retrieve,
)
from vaa_audit.retrieval.search import FixtureSearchBackend, HTTPSearchBackend, SearchError, web_search
from vaa_audit.retrieval.snippets import RetrievedSnippet, format_snippets, format_web_snippets

__all__ = [
    "CorpusParagraph",
    "EmbeddingBackend",
    "FixtureSearchBackend",
    "HTTPSearchBackend",
    "Index",
    "IndexBuildError",
    "LexicalBackend",
    "RetrievedSnippet",
    "SearchError",
    "build_index",
    "format_snippets",
    "format_web_snippets",
    "load_corpus",
    "retrieve",
    "split_manifesto",
    "web_search",
]
