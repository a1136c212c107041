from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

if TYPE_CHECKING:
    from vaa_audit.dataset import Party


@dataclass(frozen=True)
class RetrievedSnippet:
    source: str
    text: str
    score: float
    party: str

    def __post_init__(self):
        if not math.isfinite(self.score):
            raise ValueError(f"snippet score must be finite, got {self.score}")


def format_snippets(party: Party, snippets: Sequence[RetrievedSnippet]) -> str:
    """Manifesto snippets as one context turn, numbered in retrieval order."""
    if not snippets:
        raise ValueError("no snippets to format")
    head = (
        f"These are relevant snippets from the official manifesto of the {party.display_name} party "
        "for the European Elections 2024:"
    )
    return " ".join([head] + [f"{i}. {s.text}" for i, s in enumerate(snippets, start=1)])


def format_web_snippets(snippets: Sequence[RetrievedSnippet]) -> str:
    if not snippets:
        raise ValueError("no snippets to format")
    lines = ["These are relevant snippets retrieved from the web:"]
    lines += [f"{i}. {s.source}: {s.text}" for i, s in enumerate(snippets, start=1)]
    return "\n".join(lines)
