"""Questionnaire, party registry and party answers.

A dataset directory holds three UTF-8 line-delimited JSON files:

* ``statements.jsonl``: ``{"id", "text", "topic"?}``
* ``parties.jsonl``: ``{"key", "name", "origin", "country_code", "euro_party", "euro_group"}``
* ``answers.jsonl``: ``{"party", "statement_id", "answer_letter", "justification_original",
  "justification_language", "justification_english"}``
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable

COUNTRY_CODES = ("EU", "DE", "FR", "IT", "ES")

STATEMENTS_FILE = "statements.jsonl"
PARTIES_FILE = "parties.jsonl"
ANSWERS_FILE = "answers.jsonl"


class DatasetError(Exception):
    """Raised when a dataset directory cannot be loaded."""


class DatasetValidationError(DatasetError):
    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__(f"{len(problems)} invalid reference(s): " + "; ".join(problems))


class LikertOption(Enum):
    """Five-point agreement scale, ordered from full disagreement to full agreement."""

    A = "a"
    B = "b"
    C = "c"
    D = "d"
    E = "e"

    @property
    def letter(self) -> str:
        return self.value

    @property
    def label(self) -> str:
        return _LIKERT_LABELS[self.value]

    @classmethod
    def from_letter(cls, letter: str) -> LikertOption:
        try:
            return cls(letter.strip().lower())
        except ValueError:
            raise ValueError(f"not a Likert option letter: {letter!r}") from None


_LIKERT_LABELS = {
    "a": "Completely disagree",
    "b": "Tend to disagree",
    "c": "Neutral",
    "d": "Tend to agree",
    "e": "Completely agree",
}

LIKERT_OPTIONS: tuple[LikertOption, ...] = tuple(LikertOption)


@dataclass(frozen=True)
class Statement:
    id: int
    text: str
    topic: str | None = None

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError(f"statement {self.id} has empty text")


@dataclass(frozen=True)
class Party:
    key: str
    name: str
    origin: str
    country_code: str
    euro_party: str | None = None
    euro_group: str | None = None

    def __post_init__(self):
        for attr in ("key", "name", "origin"):
            if not getattr(self, attr).strip():
                raise ValueError(f"party {self.key!r}: {attr} must be non-empty")

    @property
    def is_euro_party(self) -> bool:
        return self.country_code == "EU"

    @property
    def display_name(self) -> str:
        """Origin and name as they read in prompts, e.g. ``German Die Linke (Linke)``.

        The origin is not repeated when the name already starts with it, so
        ``European People's Party (EPP)`` stays as is.
        """
        if self.name == self.origin or self.name.startswith(self.origin + " "):
            return self.name
        return f"{self.origin} {self.name}"


@dataclass(frozen=True)
class PartyAnswer:
    party: str
    statement_id: int
    answer: LikertOption
    justification_original: str = ""
    justification_language: str = ""
    justification_english: str = ""


@dataclass(frozen=True)
class Questionnaire:
    statements: tuple[Statement, ...]
    answers: tuple[PartyAnswer, ...]
    parties: tuple[Party, ...]
    _answer_index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        index = {}
        for a in self.answers:
            index.setdefault((a.party, a.statement_id), a)
        object.__setattr__(self, "_answer_index", index)

    def statement(self, statement_id: int) -> Statement:
        for s in self.statements:
            if s.id == statement_id:
                return s
        raise KeyError(f"unknown statement {statement_id}")

    def party(self, key: str) -> Party:
        for p in self.parties:
            if p.key == key:
                return p
        raise KeyError(f"unknown party {key!r}")

    def answer(self, party: str, statement_id: int) -> PartyAnswer | None:
        return self._answer_index.get((party, statement_id))

    def answers_for(self, party: str) -> list[PartyAnswer]:
        """Answers of one party, in statement order."""
        return sorted((a for a in self.answers if a.party == party), key=lambda a: a.statement_id)


@dataclass(frozen=True)
class Issue:
    code: str
    message: str

    def __str__(self) -> str:
        return f"[{self.code}] {self.message}"


def _read_jsonl(path: Path) -> list[dict]:
    if not path.is_file():
        raise DatasetError(f"missing dataset file: {path}")
    rows = []
    with path.open("r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append(json.loads(line))
            except json.JSONDecodeError as e:
                raise DatasetError(f"{path}:{lineno}: invalid JSON: {e.msg}") from e
    return rows


def _field(row: dict, name: str, path: Path, lineno: int):
    try:
        return row[name]
    except KeyError:
        raise DatasetError(f"{path.name} record {lineno}: missing field {name!r}") from None


def load_dataset(path: str | Path) -> Questionnaire:
    """Load a dataset directory into a cross-referenced :class:`Questionnaire`.

    Records are sorted (statements by id, parties by country then key, answers
    by party then statement), so line order in the files does not matter.
    Dangling references raise :class:`DatasetValidationError` listing every
    offender; the other invariants are reported by :func:`validate_dataset`.
    """
    root = Path(path)
    if not root.is_dir():
        raise DatasetError(f"dataset directory not found: {root}")

    statements = []
    spath = root / STATEMENTS_FILE
    for i, row in enumerate(_read_jsonl(spath), start=1):
        try:
            statements.append(
                Statement(id=int(_field(row, "id", spath, i)), text=str(_field(row, "text", spath, i)), topic=row.get("topic"))
            )
        except ValueError as e:
            raise DatasetError(f"{spath.name} record {i}: {e}") from e

    parties = []
    ppath = root / PARTIES_FILE
    for i, row in enumerate(_read_jsonl(ppath), start=1):
        try:
            parties.append(
                Party(
                    key=str(_field(row, "key", ppath, i)),
                    name=str(_field(row, "name", ppath, i)),
                    origin=str(_field(row, "origin", ppath, i)),
                    country_code=str(_field(row, "country_code", ppath, i)),
                    euro_party=row.get("euro_party"),
                    euro_group=row.get("euro_group"),
                )
            )
        except ValueError as e:
            raise DatasetError(f"{ppath.name} record {i}: {e}") from e

    answers = []
    apath = root / ANSWERS_FILE
    for i, row in enumerate(_read_jsonl(apath), start=1):
        try:
            option = LikertOption.from_letter(str(_field(row, "answer_letter", apath, i)))
        except ValueError as e:
            raise DatasetError(f"{apath.name} record {i}: {e}") from e
        answers.append(
            PartyAnswer(
                party=str(_field(row, "party", apath, i)),
                statement_id=int(_field(row, "statement_id", apath, i)),
                answer=option,
                justification_original=row.get("justification_original") or "",
                justification_language=row.get("justification_language") or "",
                justification_english=row.get("justification_english") or "",
            )
        )

    q = _assemble(statements, parties, answers)
    problems = _dangling_references(q)
    if problems:
        raise DatasetValidationError(problems)
    return q


def _assemble(statements: Iterable[Statement], parties: Iterable[Party], answers: Iterable[PartyAnswer]) -> Questionnaire:
    def party_order(p: Party):
        rank = COUNTRY_CODES.index(p.country_code) if p.country_code in COUNTRY_CODES else len(COUNTRY_CODES)
        return (rank, p.key)

    return Questionnaire(
        statements=tuple(sorted(statements, key=lambda s: s.id)),
        parties=tuple(sorted(parties, key=party_order)),
        answers=tuple(sorted(answers, key=lambda a: (a.party, a.statement_id))),
    )


def _dangling_references(q: Questionnaire) -> list[str]:
    party_keys = {p.key for p in q.parties}
    statement_ids = {s.id for s in q.statements}
    problems = []
    for a in q.answers:
        if a.party not in party_keys:
            problems.append(f"answer (party {a.party!r}, statement {a.statement_id}) references unknown party {a.party!r}")
        if a.statement_id not in statement_ids:
            problems.append(f"answer (party {a.party!r}, statement {a.statement_id}) references unknown statement {a.statement_id}")
    return problems


def validate_dataset(q: Questionnaire, expect_statement_count: int | None = None) -> list[Issue]:
    """Check every dataset invariant; an empty list means the dataset is sound."""
    issues = [Issue("dangling_reference", msg) for msg in _dangling_references(q)]

    if expect_statement_count is not None and len(q.statements) != expect_statement_count:
        issues.append(
            Issue("count_mismatch", f"expected {expect_statement_count} statements, found {len(q.statements)}")
        )

    for sid, n in sorted(Counter(s.id for s in q.statements).items()):
        if n > 1:
            issues.append(Issue("duplicate_statement", f"statement id {sid} appears {n} times"))

    for key, n in sorted(Counter(p.key for p in q.parties).items()):
        if n > 1:
            issues.append(Issue("duplicate_party", f"party {key!r} appears {n} times"))

    for (party, sid), n in sorted(Counter((a.party, a.statement_id) for a in q.answers).items()):
        if n > 1:
            issues.append(Issue("duplicate_answer", f"party {party!r} answers statement {sid} {n} times"))

    euro_keys = {p.key for p in q.parties if p.country_code == "EU"}
    groups = {}
    for p in q.parties:
        if p.country_code not in COUNTRY_CODES:
            issues.append(Issue("unknown_country", f"party {p.key!r} has unknown country code {p.country_code!r}"))
        if p.country_code == "EU" and p.euro_party != p.key:
            issues.append(Issue("euro_party_self", f"euro-party {p.key!r} must list itself as euro_party"))
        elif p.country_code != "EU" and p.euro_party is not None and euro_keys and p.euro_party not in euro_keys:
            issues.append(Issue("unknown_euro_party", f"party {p.key!r} affiliates with unknown euro-party {p.euro_party!r}"))
        groups.setdefault(p.key, set()).add(p.euro_group)
    for key, seen in sorted(groups.items()):
        if len(seen) > 1:
            issues.append(Issue("multiple_euro_groups", f"party {key!r} maps to euro-groups {sorted(map(str, seen))}"))

    for a in q.answers:
        if a.justification_original.strip() and not a.justification_english.strip():
            issues.append(
                Issue(
                    "missing_translation",
                    f"party {a.party!r} statement {a.statement_id}: justification has no English version",
                )
            )
    return issues


def export_dataset(q: Questionnaire, path: str | Path) -> None:
    """Write ``q`` in the on-disk layout read by :func:`load_dataset`."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)

    def dump(name: str, rows: Iterable[dict]) -> None:
        with (root / name).open("w", encoding="utf-8", newline="\n") as f:
            for row in rows:
                f.write(json.dumps(row, ensure_ascii=False) + "\n")

    dump(
        STATEMENTS_FILE,
        ({"id": s.id, "text": s.text, **({"topic": s.topic} if s.topic is not None else {})} for s in q.statements),
    )
    dump(
        PARTIES_FILE,
        (
            {
                "key": p.key,
                "name": p.name,
                "origin": p.origin,
                "country_code": p.country_code,
                "euro_party": p.euro_party,
                "euro_group": p.euro_group,
            }
            for p in q.parties
        ),
    )
    dump(
        ANSWERS_FILE,
        (
            {
                "party": a.party,
                "statement_id": a.statement_id,
                "answer_letter": a.answer.letter,
                "justification_original": a.justification_original,
                "justification_language": a.justification_language,
                "justification_english": a.justification_english,
            }
            for a in q.answers
        ),
    )


def sample_dataset_path() -> Path:
    """Directory of the bundled sample dataset."""
    return Path(__file__).parent / "data" / "sample"


def sample_manifesto_path() -> Path:
    """Directory of the bundled sample euro-party manifestos."""
    return Path(__file__).parent / "data" / "manifestos"
