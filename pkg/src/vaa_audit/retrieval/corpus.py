from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

MIN_PARAGRAPH_CHARS = 200
MAX_PARAGRAPH_CHARS = 2000

_BLANK_LINE = re.compile(r"\n[ \t\f\v]*\n")
_SENTENCE_END = re.compile(r"(?<=[.!?])[\"'»”)\]]*\s+")


@dataclass(frozen=True)
class CorpusParagraph:
    party: str
    index: int
    text: str


def _normalize(block: str) -> str:
    return " ".join(line.strip() for line in block.splitlines() if line.strip())


def _split_long(text: str, limit: int) -> list[str]:
    pieces = []
    while len(text) > limit:
        cut = None
        for m in _SENTENCE_END.finditer(text, 0, limit + 1):
            if m.start() > 0:
                cut = m
        if cut is not None:
            head, text = text[: cut.start()].rstrip(), text[cut.end():]
        else:
            space = text.rfind(" ", 0, limit + 1)
            at = space if space > 0 else limit
            head, text = text[:at].rstrip(), text[at:].lstrip()
        pieces.append(head)
    if text:
        pieces.append(text)
    return pieces


def split_manifesto(party: str, raw: str) -> list[CorpusParagraph]:
    """Split a manifesto into retrieval paragraphs.

    Blocks are cut on blank lines and their line breaks joined with spaces.
    A block shorter than 200 characters (headings, slogans) is merged into
    the following one; a trailing short block joins the previous paragraph.
    Paragraphs above 2000 characters are cut at the last sentence end that
    keeps the piece within the limit.
    """
    text = raw.replace("\r\n", "\n").replace("\r", "\n")
    blocks = [b for b in (_normalize(chunk) for chunk in _BLANK_LINE.split(text)) if b]

    merged: list[str] = []
    pending = ""
    for block in blocks:
        pending = f"{pending}\n{block}" if pending else block
        if len(pending) >= MIN_PARAGRAPH_CHARS:
            merged.append(pending)
            pending = ""
    if pending:
        if merged:
            merged[-1] = f"{merged[-1]}\n{pending}"
        else:
            merged.append(pending)

    paragraphs = [piece for para in merged for piece in _split_long(para, MAX_PARAGRAPH_CHARS)]
    return [CorpusParagraph(party=party, index=i, text=p) for i, p in enumerate(paragraphs)]


def load_corpus(directory: str | Path) -> list[CorpusParagraph]:
    """Read every ``{party_key}.txt`` manifesto in ``directory``."""
    root = Path(directory)
    if not root.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {root}")
    corpus = []
    for path in sorted(root.glob("*.txt")):
        corpus.extend(split_manifesto(path.stem, path.read_text(encoding="utf-8")))
    return corpus
