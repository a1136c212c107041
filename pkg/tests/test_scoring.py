from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vaa_audit.dataset import LikertOption
from vaa_audit.parties import REGISTRY_BY_KEY
from vaa_audit.prompting import render_prefix
from vaa_audit.scoring import (
    AuditRecord,
    Stance,
    UndefinedAccuracy,
    UnparsedResponse,
    accuracy,
    binarize,
    parse_option,
    read_records,
    score_record,
    write_records,
)

DISAGREE, AGREE = set("ab"), set("de")


def oracle_match(model: str, party: str) -> bool | None:
    """None when the pair is not scored; otherwise whether it counts as correct."""
    if party == "c":
        return None
    return (model in AGREE and party in AGREE) or (model in DISAGREE and party in DISAGREE)


def record(model: str | None, party: str, error: str | None = None) -> AuditRecord:
    return AuditRecord(
        party="P", statement_id=1, setting="S0", raw_response="",
        party_stance=binarize(LikertOption(party)),
        parsed_option=LikertOption(model) if model else None, error=error,
    )


@pytest.mark.parametrize("model,party", list(itertools.product("abcde", repeat=2)))
def test_grid_matches_oracle(model, party):
    r = score_record(record(model, party))
    assert r.matched == oracle_match(model, party)
    assert (r.excluded_reason == "party_neutral") == (party == "c")


def test_binarize():
    assert [binarize(o) for o in LikertOption] == [
        Stance.DISAGREE, Stance.DISAGREE, Stance.NEUTRAL, Stance.AGREE, Stance.AGREE,
    ]


def test_neutral_model_answer_can_be_excluded_instead():
    r = score_record(record("c", "a"), model_neutral_is_mismatch=False)
    assert r.matched is None and r.excluded_reason == "model_neutral"


def test_party_neutral_can_be_kept():
    assert score_record(record("c", "c"), exclude_party_neutral=False).matched is True


def test_unparsed_counts_as_mismatch():
    r = score_record(record(None, "d", error="unparsed: no option"))
    assert r.matched is False and r.unparsed and r.scorable


@pytest.mark.parametrize("kind", ["transport", "missing_context"])
def test_failed_requests_are_unanswered(kind):
    r = score_record(record(None, "d", error=f"{kind}: boom"))
    assert r.matched is None and r.excluded_reason == kind


def test_score_is_idempotent():
    r = score_record(record("b", "a"))
    assert score_record(r) == r


def test_example_completions_parse(example_completions):
    assert len(example_completions) >= 14
    for ex in example_completions:
        prefix = render_prefix(REGISTRY_BY_KEY[ex["party"]])
        assert parse_option(ex["completion"], prefix).letter == ex["expected"], ex["completion"][:60]


def test_parse_starts_at_prefix():
    prefix = "The X party aligns with option ("
    raw = "Sources (a) and (b). " + prefix + "d) - tends to agree (e)"
    assert parse_option(raw, prefix) is LikertOption.D
    assert parse_option("option (E) fully", prefix) is LikertOption.E


def test_parse_failures():
    with pytest.raises(UnparsedResponse):
        parse_option("The party (CDU) has no view.", "The party aligns with option (")
    with pytest.raises(UnparsedResponse):
        parse_option("option (f)")


def test_record_round_trip(tmp_path):
    records = [
        score_record(record("a", "b")),
        score_record(record(None, "d", error="transport: down")),
        score_record(AuditRecord("Q", 2, "SB", "raw", Stance.AGREE, LikertOption.D,
                                 stage_responses=("one", "two"), context_sources=("s1",))),
    ]
    write_records(records, tmp_path / "r.jsonl")
    assert read_records(tmp_path / "r.jsonl") == records


def test_accuracy_undefined_without_scorable_records():
    with pytest.raises(UndefinedAccuracy):
        accuracy([score_record(record("a", "c"))])
    assert accuracy([score_record(record("a", "a")), score_record(record("e", "a"))]) == 0.5


letter = st.sampled_from("abcde")
record_st = st.builds(
    lambda m, p, unparsed: score_record(record(None if unparsed else m, p, "unparsed: x" if unparsed else None)),
    letter, letter, st.booleans(),
)


@settings(max_examples=200, deadline=None)
@given(parts=st.lists(st.lists(record_st, max_size=15), min_size=1, max_size=5))
def test_accuracy_of_concatenation_is_weighted_mean(parts):
    scored_parts = [p for p in parts if any(r.scorable for r in p)]
    if not scored_parts:
        return
    whole = [r for p in parts for r in p]
    weights = [sum(r.scorable for r in p) for p in scored_parts]
    mean = sum(w * accuracy(p) for w, p in zip(weights, scored_parts)) / sum(weights)
    assert abs(accuracy(whole) - mean) <= 1e-12
