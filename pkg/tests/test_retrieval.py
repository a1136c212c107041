from __future__ import annotations

import functools
import json
import re

import httpx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vaa_audit.dataset import sample_manifesto_path
from vaa_audit.parties import EURO_PARTIES, REGISTRY_BY_KEY
from vaa_audit.retrieval import (
    CorpusParagraph,
    EmbeddingBackend,
    FixtureSearchBackend,
    HTTPSearchBackend,
    Index,
    IndexBuildError,
    LexicalBackend,
    RetrievedSnippet,
    SearchError,
    build_index,
    format_snippets,
    load_corpus,
    retrieve,
    split_manifesto,
    web_search,
)
from vaa_audit.retrieval.index import STOPWORDS

from conftest import write_jsonl

TIE = 1e-9


def brute_force_scores(texts: list[str], query: str) -> np.ndarray:
    """Dense TF-IDF cosine scores computed from scratch with numpy."""
    def toks(t):
        return [w for w in re.findall(r"\w+", t.lower()) if w not in STOPWORDS]

    docs = [toks(t) for t in texts]
    vocab = sorted({w for d in docs for w in d})
    col = {w: i for i, w in enumerate(vocab)}
    counts = np.zeros((len(docs), len(vocab)))
    for r, d in enumerate(docs):
        for w in d:
            counts[r, col[w]] += 1
    with np.errstate(divide="ignore"):
        tf = np.where(counts > 0, 1 + np.log(np.where(counts > 0, counts, 1)), 0.0)
    df = (counts > 0).sum(axis=0)
    idf = np.log((1 + len(docs)) / (1 + df)) + 1
    m = tf * idf
    norms = np.linalg.norm(m, axis=1, keepdims=True)
    m = np.divide(m, norms, out=np.zeros_like(m), where=norms > 0)

    qc = np.zeros(len(vocab))
    for w in toks(query):
        if w in col:
            qc[col[w]] += 1
    qtf = np.where(qc > 0, 1 + np.log(np.where(qc > 0, qc, 1)), 0.0) * idf
    qn = np.linalg.norm(qtf)
    if qn == 0:
        return np.zeros(len(docs))
    return m @ (qtf / qn)


def oracle_ranking(scores: np.ndarray) -> list[int]:
    def cmp(i, j):
        if abs(scores[i] - scores[j]) <= TIE:
            return i - j
        return -1 if scores[i] > scores[j] else 1

    return sorted(range(len(scores)), key=functools.cmp_to_key(cmp))


WORDS = ["tax", "euro", "border", "climate", "energy", "farm", "union", "vote", "the", "and", "of", "wage", "bank"]
paragraph = st.lists(st.sampled_from(WORDS), min_size=0, max_size=12).map(" ".join)


@settings(max_examples=150, deadline=None)
@given(
    texts=st.lists(paragraph, min_size=1, max_size=20),
    query=st.lists(st.sampled_from(WORDS + ["unseen"]), min_size=1, max_size=6).map(" ".join),
    k=st.integers(1, 25),
)
def test_lexical_retrieval_matches_brute_force(texts, query, k):
    corpus = [CorpusParagraph("P", i, t) for i, t in enumerate(texts)]
    hits = retrieve(build_index(corpus), "P", query, k)
    scores = brute_force_scores(texts, query)
    expected = oracle_ranking(scores)[:k]
    assert [int(h.source.split("#")[1]) for h in hits] == expected
    for h in hits:
        assert abs(h.score - scores[int(h.source.split("#")[1])]) <= 1e-9


def test_partitions_are_scored_separately():
    corpus = [
        CorpusParagraph("A", 0, "tax tax bank"),
        CorpusParagraph("A", 1, "climate energy"),
        CorpusParagraph("B", 0, "tax climate"),
    ]
    index = build_index(corpus)
    assert [s.text for s in retrieve(index, "A", "tax", 5)] == ["tax tax bank", "climate energy"]
    assert [s.party for s in retrieve(index, "B", "tax", 1)] == ["B"]
    with pytest.raises(LookupError):
        retrieve(index, "C", "tax")
    with pytest.raises(ValueError):
        retrieve(index, "A", "tax", 0)


def test_ties_keep_paragraph_order():
    corpus = [CorpusParagraph("P", i, "farm subsidies") for i in (4, 1, 3)]
    hits = retrieve(build_index(corpus), "P", "farm", 3)
    assert [h.source for h in hits] == ["P.txt#1", "P.txt#3", "P.txt#4"]


def test_duplicate_indices_are_rejected():
    with pytest.raises(IndexBuildError):
        build_index([CorpusParagraph("P", 0, "a"), CorpusParagraph("P", 0, "b")])


def test_index_save_load_round_trip(tmp_path):
    corpus = load_corpus(sample_manifesto_path())
    index = build_index(corpus)
    index.save(tmp_path / "index.json")
    loaded = Index.load(tmp_path / "index.json", LexicalBackend())
    query = "The single European currency (Euro) is a bad thing"
    assert retrieve(loaded, "EPP", query) == retrieve(index, "EPP", query)
    with pytest.raises(RuntimeError):
        retrieve(Index.load(tmp_path / "index.json"), "EPP", query)


def test_index_refuses_other_backend(tmp_path):
    index = build_index([CorpusParagraph("P", 0, "tax")])
    index.save(tmp_path / "i.json")
    other = EmbeddingBackend("http://embed.test/v1/embeddings", client=httpx.Client())
    with pytest.raises(ValueError, match="cannot use backend"):
        Index.load(tmp_path / "i.json", other)


def test_sample_manifesto_paragraph_counts():
    for key in EURO_PARTIES:
        raw = (sample_manifesto_path() / f"{key}.txt").read_text(encoding="utf-8")
        assert 60 <= len(split_manifesto(key, raw)) <= 100, key


def test_split_merges_short_blocks_and_cuts_long_ones():
    long_sentence = "This sentence is about energy policy in Europe. "
    raw = "\n\n".join(["Heading", "x" * 250, "tail", long_sentence * 60])
    paras = split_manifesto("P", raw)
    assert len(paras) == 3
    assert paras[0].text == "Heading\n" + "x" * 250
    assert all(len(p.text) <= 2000 for p in paras)
    assert all(p.text.endswith(".") for p in paras[1:])
    assert " ".join(p.text for p in paras[1:]) == "tail\n" + (long_sentence * 60).strip()
    assert [p.index for p in paras] == [0, 1, 2]


def test_split_joins_wrapped_lines():
    raw = "first line of a block\nsecond line " + "y" * 200
    (p,) = split_manifesto("P", raw)
    assert p.text == "first line of a block second line " + "y" * 200


def test_trailing_short_block_joins_previous():
    raw = "z" * 300 + "\n\nVote in June."
    (p,) = split_manifesto("P", raw)
    assert p.text == "z" * 300 + "\nVote in June."


def test_format_snippets():
    epp = REGISTRY_BY_KEY["EPP"]
    snippets = [RetrievedSnippet(f"EPP.txt#{i}", t, 1.0, "EPP") for i, t in enumerate(["One.", "Two."])]
    assert format_snippets(epp, snippets) == (
        "These are relevant snippets from the official manifesto of the European People's Party (EPP) party "
        "for the European Elections 2024: 1. One. 2. Two."
    )
    with pytest.raises(ValueError):
        format_snippets(epp, [])


def test_snippet_score_must_be_finite():
    with pytest.raises(ValueError):
        RetrievedSnippet("s", "t", float("nan"), "P")


def _embedding_handler(calls):
    def handler(request: httpx.Request) -> httpx.Response:
        body = json.loads(request.content)
        calls.append(body)
        vectors = [[float(len(t)), float(t.count("tax")), 1.0] for t in body["input"]]
        return httpx.Response(200, json={"data": [{"index": i, "embedding": v} for i, v in enumerate(vectors)]})

    return handler


def test_embedding_backend_with_mock_transport():
    calls = []
    client = httpx.Client(transport=httpx.MockTransport(_embedding_handler(calls)))
    backend = EmbeddingBackend("http://embed.test/v1/embeddings", "m", batch_size=2, client=client)
    corpus = [CorpusParagraph("P", i, t) for i, t in enumerate(["tax tax", "energy", "tax"])]
    index = build_index(corpus, backend)
    assert index.backend_id == "embedding:m"
    assert [len(c["input"]) for c in calls] == [2, 1]
    hits = retrieve(index, "P", "tax tax", 3)
    assert hits[0].text == "tax tax"


def test_embedding_failure_names_the_batch():
    client = httpx.Client(transport=httpx.MockTransport(lambda r: httpx.Response(503)))
    backend = EmbeddingBackend("http://embed.test/v1/embeddings", client=client)
    with pytest.raises(IndexBuildError, match="P paragraphs 0-1"):
        build_index([CorpusParagraph("P", 0, "a"), CorpusParagraph("P", 1, "b")], backend)


def test_fixture_search_first_match_wins(tmp_path):
    write_jsonl(tmp_path / "a.jsonl", [
        {"pattern": "CDU", "results": [{"title": "T1", "url": "https://x.test/1", "snippet": "S1"},
                                       {"title": "T2", "url": "https://x.test/2", "snippet": ""},
                                       {"title": "T3", "url": "https://x.test/3", "snippet": "S3"}]},
        {"pattern": "", "results": [{"title": "Fallback", "url": "https://x.test/f", "snippet": "F"}]},
    ])
    backend = FixtureSearchBackend(tmp_path)
    hits = web_search(backend, "what about the cdu", 3, party="CDU")
    assert [h.source for h in hits] == ["T1 (https://x.test/1)", "T3 (https://x.test/3)"]
    assert [h.score for h in hits] == [1.0, 1 / 3]
    assert web_search(backend, "anything", 4)[0].text == "F"


def test_web_search_retries_then_raises():
    class Flaky:
        def __init__(self, failures):
            self.failures = failures
            self.calls = 0

        def search(self, query, limit):
            self.calls += 1
            if self.calls <= self.failures:
                raise SearchError("down")
            return []

    sleeps = []
    ok = Flaky(2)
    assert web_search(ok, "q", retries=2, sleep=sleeps.append) == []
    assert ok.calls == 3 and sleeps == [0.5, 1.0]
    with pytest.raises(SearchError):
        web_search(Flaky(5), "q", retries=1, sleep=lambda s: None)


def test_http_search_backend():
    seen = []

    def handler(request):
        seen.append(dict(request.url.params))
        return httpx.Response(200, json={"results": [{"title": "T", "url": "u", "snippet": "s"}]})

    backend = HTTPSearchBackend("http://search.test/q", client=httpx.Client(transport=httpx.MockTransport(handler)))
    assert web_search(backend, "hello", 2)[0].source == "T (u)"
    assert seen == [{"q": "hello", "limit": "2"}]

    failing = HTTPSearchBackend("http://search.test/q", client=httpx.Client(
        transport=httpx.MockTransport(lambda r: httpx.Response(500))))
    with pytest.raises(SearchError):
        failing.search("x", 1)
