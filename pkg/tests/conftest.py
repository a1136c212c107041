from __future__ import annotations

import json
from pathlib import Path

import pytest

from vaa_audit.dataset import load_dataset, sample_dataset_path
from vaa_audit.parties import REGISTRY_BY_KEY

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"


def write_jsonl(path: Path, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows), encoding="utf-8")


def tiny_dataset(root: Path, *, answers=None, parties=None, statements=None) -> Path:
    """Two statements, two parties; override any file's rows."""
    statements = statements or [{"id": 1, "text": "Taxes should rise"}, {"id": 2, "text": "The euro is good"}]
    parties = parties or [
        {"key": "EPP", "name": "European People's Party (EPP)", "origin": "European", "country_code": "EU",
         "euro_party": "EPP", "euro_group": "EPP"},
        {"key": "CDU", "name": "Christlich Demokratische Union Deutschlands (CDU)", "origin": "German",
         "country_code": "DE", "euro_party": "EPP", "euro_group": "EPP"},
    ]
    if answers is None:
        answers = [
            {"party": p["key"], "statement_id": s["id"], "answer_letter": "d", "justification_original": "x",
             "justification_language": "en", "justification_english": "x"}
            for p in parties for s in statements
        ]
    write_jsonl(root / "statements.jsonl", statements)
    write_jsonl(root / "parties.jsonl", parties)
    write_jsonl(root / "answers.jsonl", answers)
    return root


@pytest.fixture(scope="session")
def sample():
    return load_dataset(sample_dataset_path())


@pytest.fixture
def cdu():
    return REGISTRY_BY_KEY["CDU"]


@pytest.fixture(scope="session")
def example_completions():
    lines = (FIXTURES / "example_completions.jsonl").read_text(encoding="utf-8").splitlines()
    return [json.loads(line) for line in lines if line.strip()]
