"""Party-partitioned paragraph index with cosine-similarity retrieval.

Two scorer backends are available: :class:`LexicalBackend` computes
sublinear TF-IDF weights per party partition and needs nothing external;
:class:`EmbeddingBackend` asks an HTTP embedding endpoint for dense vectors.
"""

from __future__ import annotations

import json
import logging
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Protocol, Sequence

import httpx

from vaa_audit.retrieval.corpus import CorpusParagraph
from vaa_audit.retrieval.snippets import RetrievedSnippet

logger = logging.getLogger(__name__)

DEFAULT_K = 3

Vector = Any  # dict[str, float] for lexical weights, tuple[float, ...] for embeddings


class IndexBuildError(RuntimeError):
    pass


class ScorerBackend(Protocol):
    backend_id: str

    def vectorize_partition(self, party: str, texts: Sequence[str]) -> tuple[list[Vector], dict | None]: ...

    def vectorize_query(self, query: str, state: dict | None) -> Vector: ...


_TOKEN = re.compile(r"\w+")

STOPWORDS = frozenset(
    """a an and are as at be been but by can for from has have if in into is it its of on or our
    should so such than that the their them there these they this to was we were which will with
    would""".split()
)


def tokenize(text: str) -> list[str]:
    return [t for t in _TOKEN.findall(text.lower()) if t not in STOPWORDS]


def _l2_normalize(weights: dict[str, float]) -> dict[str, float]:
    norm = math.sqrt(sum(w * w for w in weights.values()))
    if norm == 0.0:
        return {}
    return {t: w / norm for t, w in sorted(weights.items())}


class LexicalBackend:
    """TF-IDF with ``tf = 1 + ln(count)`` and ``idf = ln((1 + N) / (1 + df)) + 1``.

    Document frequencies are computed within one party partition, so each
    manifesto is scored against its own vocabulary.
    """

    backend_id = "lexical-tfidf-v1"

    def _weights(self, tokens: list[str], idf: dict[str, float]) -> dict[str, float]:
        counts = Counter(t for t in tokens if t in idf)
        return _l2_normalize({t: (1.0 + math.log(c)) * idf[t] for t, c in counts.items()})

    def vectorize_partition(self, party, texts):
        docs = [tokenize(t) for t in texts]
        n = len(docs)
        df = Counter(t for doc in docs for t in set(doc))
        idf = {t: math.log((1 + n) / (1 + d)) + 1.0 for t, d in sorted(df.items())}
        return [self._weights(doc, idf) for doc in docs], {"idf": idf}

    def vectorize_query(self, query, state):
        return self._weights(tokenize(query), state["idf"])


class EmbeddingBackend:
    """Dense vectors from an embedding endpoint.

    The endpoint receives ``{"model": ..., "input": [texts]}`` and answers
    either ``{"data": [{"index": i, "embedding": [...]}, ...]}`` or
    ``{"embeddings": [[...], ...]}`` with one vector per text.
    """

    def __init__(
        self,
        url: str,
        model: str = "sentence-transformers/all-mpnet-base-v2",
        *,
        batch_size: int = 32,
        api_key: str | None = None,
        timeout: float = 60.0,
        client: httpx.Client | None = None,
    ):
        self.url = url
        self.model = model
        self.batch_size = batch_size
        self.backend_id = f"embedding:{model}"
        headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._client = client or httpx.Client(timeout=timeout, headers=headers)

    def embed(self, texts: Sequence[str]) -> list[tuple[float, ...]]:
        resp = self._client.post(self.url, json={"model": self.model, "input": list(texts)})
        resp.raise_for_status()
        body = resp.json()
        if "data" in body:
            rows = sorted(body["data"], key=lambda r: r.get("index", 0))
            vectors = [r["embedding"] for r in rows]
        else:
            vectors = body["embeddings"]
        if len(vectors) != len(texts):
            raise ValueError(f"endpoint returned {len(vectors)} vectors for {len(texts)} texts")
        return [tuple(float(x) for x in v) for v in vectors]

    def vectorize_partition(self, party, texts):
        vectors: list[tuple[float, ...]] = []
        for start in range(0, len(texts), self.batch_size):
            batch = texts[start : start + self.batch_size]
            try:
                vectors.extend(self.embed(batch))
            except (httpx.HTTPError, ValueError, KeyError, TypeError) as e:
                raise IndexBuildError(
                    f"embedding batch for {party} paragraphs {start}-{start + len(batch) - 1} failed: {e}"
                ) from e
        dims = {len(v) for v in vectors}
        if len(dims) > 1:
            raise IndexBuildError(f"embedding endpoint returned mixed dimensions {sorted(dims)} for {party}")
        return vectors, None

    def vectorize_query(self, query, state):
        return self.embed([query])[0]


def cosine(a: Vector, b: Vector) -> float:
    if isinstance(a, dict):
        if not a or not b:
            return 0.0
        small, large = (a, b) if len(a) <= len(b) else (b, a)
        return sum(w * large.get(t, 0.0) for t, w in small.items())
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(y * y for y in b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return dot / (na * nb)


@dataclass(frozen=True)
class Partition:
    party: str
    paragraphs: tuple[CorpusParagraph, ...]
    vectors: tuple[Vector, ...]
    state: dict | None = None

    def __post_init__(self):
        if len(self.vectors) != len(self.paragraphs):
            raise ValueError(
                f"partition {self.party}: {len(self.vectors)} vectors for {len(self.paragraphs)} paragraphs"
            )


@dataclass(frozen=True)
class Index:
    backend_id: str
    partitions: dict[str, Partition]
    backend: ScorerBackend | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.backend is not None and self.backend.backend_id != self.backend_id:
            raise ValueError(f"index built with {self.backend_id!r} cannot use backend {self.backend.backend_id!r}")

    def __contains__(self, party: str) -> bool:
        return party in self.partitions

    def to_dict(self) -> dict:
        def vec(v):
            return dict(v) if isinstance(v, dict) else list(v)

        return {
            "backend": self.backend_id,
            "partitions": {
                party: {
                    "paragraphs": [{"index": p.index, "text": p.text} for p in part.paragraphs],
                    "vectors": [vec(v) for v in part.vectors],
                    "state": part.state,
                }
                for party, part in sorted(self.partitions.items())
            },
        }

    @classmethod
    def from_dict(cls, data: dict, backend: ScorerBackend | None = None) -> Index:
        partitions = {}
        for party, raw in data["partitions"].items():
            partitions[party] = Partition(
                party=party,
                paragraphs=tuple(CorpusParagraph(party, p["index"], p["text"]) for p in raw["paragraphs"]),
                vectors=tuple(v if isinstance(v, dict) else tuple(v) for v in raw["vectors"]),
                state=raw.get("state"),
            )
        return cls(backend_id=data["backend"], partitions=partitions, backend=backend)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path, backend: ScorerBackend | None = None) -> Index:
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")), backend)


def build_index(corpus: Sequence[CorpusParagraph], backend: ScorerBackend | None = None) -> Index:
    backend = backend or LexicalBackend()
    by_party: dict[str, list[CorpusParagraph]] = {}
    for para in corpus:
        by_party.setdefault(para.party, []).append(para)

    partitions = {}
    for party, paras in sorted(by_party.items()):
        paras.sort(key=lambda p: p.index)
        indices = [p.index for p in paras]
        if len(set(indices)) != len(indices):
            raise IndexBuildError(f"duplicate paragraph indices in {party} corpus")
        vectors, state = backend.vectorize_partition(party, [p.text for p in paras])
        partitions[party] = Partition(party, tuple(paras), tuple(vectors), state)
        logger.debug("indexed %d paragraphs for %s", len(paras), party)
    return Index(backend_id=backend.backend_id, partitions=partitions, backend=backend)


def retrieve(index: Index, party: str, query: str, k: int = DEFAULT_K) -> list[RetrievedSnippet]:
    """Top-``k`` paragraphs of ``party`` by cosine similarity to ``query``.

    Ties keep the lower paragraph index first; scores equal to 12 decimal
    places count as ties, so summation-order noise cannot reorder them.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    try:
        part = index.partitions[party]
    except KeyError:
        raise LookupError(f"no index partition for party {party!r}") from None
    if index.backend is None:
        raise RuntimeError("index has no scorer backend attached; pass one to Index.load")

    q = index.backend.vectorize_query(query, part.state)
    scored = sorted(
        ((cosine(q, v), p) for v, p in zip(part.vectors, part.paragraphs)),
        key=lambda sp: (-round(sp[0], 12), sp[1].index),
    )
    return [
        RetrievedSnippet(source=f"{party}.txt#{p.index}", text=p.text, score=s, party=party)
        for s, p in scored[:k]
    ]
