"""Option parsing, stance binarization and accuracy.

Both sides are collapsed to agree / disagree before comparison. Statements
the party answered neutrally are excluded from scoring; a neutral model
answer against a non-neutral party counts as a mismatch, and so does a
completion without a parseable option.
"""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, replace
from enum import Enum
from typing import Iterable, Sequence

from vaa_audit.dataset import LikertOption

_OPTION = re.compile(r"\(([a-e])\)", re.IGNORECASE)

# error kinds recorded on AuditRecord.error, as "<kind>: <detail>"
UNPARSED = "unparsed"
TRANSPORT = "transport"
MISSING_CONTEXT = "missing_context"


class Stance(str, Enum):
    AGREE = "agree"
    DISAGREE = "disagree"
    NEUTRAL = "neutral"


class UnparsedResponse(ValueError):
    pass


class UndefinedAccuracy(ValueError):
    pass


def parse_option(raw: str, prefix: str = "") -> LikertOption:
    """First ``(a)``-``(e)`` at or after ``prefix`` in ``raw`` (anywhere if the prefix is absent)."""
    start = raw.find(prefix) if prefix else -1
    m = _OPTION.search(raw, max(start, 0))
    if m is None:
        where = "after the response prefix" if start >= 0 else "in the response"
        raise UnparsedResponse(f"no option (a)-(e) found {where}")
    return LikertOption.from_letter(m.group(1))


_STANCES = {
    LikertOption.A: Stance.DISAGREE,
    LikertOption.B: Stance.DISAGREE,
    LikertOption.C: Stance.NEUTRAL,
    LikertOption.D: Stance.AGREE,
    LikertOption.E: Stance.AGREE,
}


def binarize(option: LikertOption) -> Stance:
    return _STANCES[option]


@dataclass(frozen=True)
class AuditRecord:
    party: str
    statement_id: int
    setting: str
    raw_response: str
    party_stance: Stance
    parsed_option: LikertOption | None = None
    model_stance: Stance | None = None
    matched: bool | None = None
    degraded_context: bool = False
    error: str | None = None
    excluded_reason: str | None = None
    stage_responses: tuple[str, ...] = ()
    context_sources: tuple[str, ...] = ()

    @property
    def error_kind(self) -> str | None:
        return self.error.split(":", 1)[0] if self.error else None

    @property
    def scorable(self) -> bool:
        return self.matched is not None

    @property
    def unparsed(self) -> bool:
        return self.error_kind == UNPARSED

    def to_dict(self) -> dict:
        d = asdict(self)
        d["party_stance"] = self.party_stance.value
        d["parsed_option"] = self.parsed_option.letter if self.parsed_option else None
        d["model_stance"] = self.model_stance.value if self.model_stance else None
        d["stage_responses"] = list(self.stage_responses)
        d["context_sources"] = list(self.context_sources)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> AuditRecord:
        return cls(
            party=d["party"],
            statement_id=int(d["statement_id"]),
            setting=d["setting"],
            raw_response=d.get("raw_response", ""),
            party_stance=Stance(d["party_stance"]),
            parsed_option=LikertOption.from_letter(d["parsed_option"]) if d.get("parsed_option") else None,
            model_stance=Stance(d["model_stance"]) if d.get("model_stance") else None,
            matched=d.get("matched"),
            degraded_context=bool(d.get("degraded_context", False)),
            error=d.get("error"),
            excluded_reason=d.get("excluded_reason"),
            stage_responses=tuple(d.get("stage_responses", ())),
            context_sources=tuple(d.get("context_sources", ())),
        )


def score_record(
    record: AuditRecord,
    *,
    exclude_party_neutral: bool = True,
    model_neutral_is_mismatch: bool = True,
) -> AuditRecord:
    """Fill ``model_stance``, ``matched`` and ``excluded_reason``. Idempotent."""
    model_stance = binarize(record.parsed_option) if record.parsed_option else None
    out = replace(record, model_stance=model_stance, matched=None, excluded_reason=None)

    if exclude_party_neutral and record.party_stance is Stance.NEUTRAL:
        return replace(out, excluded_reason="party_neutral")
    if record.error_kind in (TRANSPORT, MISSING_CONTEXT):
        return replace(out, excluded_reason=record.error_kind)
    if model_stance is None:
        return replace(out, matched=False)
    if model_stance is Stance.NEUTRAL and not model_neutral_is_mismatch:
        return replace(out, excluded_reason="model_neutral")
    return replace(out, matched=model_stance is record.party_stance)


def accuracy(records: Iterable[AuditRecord]) -> float:
    scorable = [r.matched for r in records if r.matched is not None]
    if not scorable:
        raise UndefinedAccuracy("no scorable records")
    return sum(scorable) / len(scorable)


def write_records(records: Sequence[AuditRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for r in records:
            f.write(json.dumps(r.to_dict(), ensure_ascii=False, sort_keys=True) + "\n")


def read_records(path) -> list[AuditRecord]:
    with open(path, "r", encoding="utf-8") as f:
        return [AuditRecord.from_dict(json.loads(line)) for line in f if line.strip()]
