"""Acceptance checks, one per criterion, each with its tolerance and time budget.

Run ``python3 tests/test_acceptance.py`` for a one-line verdict per criterion,
or collect it with pytest, where every criterion is a test that prints the
same line.
"""

from __future__ import annotations

import itertools
import json
import random
import shutil
import sys
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from vaa_audit.cli import emit_all  # noqa: E402
from vaa_audit.dataset import LikertOption, load_dataset, sample_dataset_path, sample_manifesto_path  # noqa: E402
from vaa_audit.harness import EndpointConfig, RunConfig, aggregate, run_audit  # noqa: E402
from vaa_audit.mock import ScriptedEndpoint  # noqa: E402
from vaa_audit.parties import EURO_PARTIES, REGISTRY_BY_KEY  # noqa: E402
from vaa_audit.prompting import Setting  # noqa: E402
from vaa_audit.retrieval import CorpusParagraph, build_index, retrieve, split_manifesto  # noqa: E402
from vaa_audit.scoring import AuditRecord, accuracy, binarize, parse_option, score_record  # noqa: E402

from conftest import FIXTURES, GOLDEN  # noqa: E402
from test_prompting import cases  # noqa: E402
from test_retrieval import TIE, brute_force_scores, oracle_ranking  # noqa: E402

MOCK = sample_dataset_path().parent / "mock"


@dataclass
class Verdict:
    number: int
    name: str
    ok: bool
    detail: str
    seconds: float
    budget: float

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"criterion {self.number} [{status}] {self.name}: {self.detail} ({self.seconds:.2f}s, budget {self.budget:g}s)"


def timed(number: int, name: str, budget: float):
    def wrap(fn):
        def run() -> Verdict:
            start = time.perf_counter()
            ok, detail = fn()
            elapsed = time.perf_counter() - start
            if elapsed > budget:
                ok, detail = False, f"{detail}; over time budget"
            return Verdict(number, name, ok, detail, elapsed, budget)

        run.__name__ = fn.__name__
        return run

    return wrap


# 1 ---------------------------------------------------------------------------

@timed(1, "scoring oracle equivalence", 1.0)
def scoring_oracle():
    disagree, agree = set("ab"), set("de")
    mismatches = []
    for model, party in itertools.product("abcde", repeat=2):
        expected = None if party == "c" else (
            (model in agree and party in agree) or (model in disagree and party in disagree)
        )
        r = score_record(AuditRecord("P", 1, "S0", "", binarize(LikertOption(party)), LikertOption(model)))
        if r.matched != expected:
            mismatches.append(f"{model}/{party}")
    return not mismatches, "25/25 grid cells agree" if not mismatches else f"disagree on {mismatches}"


# 2 ---------------------------------------------------------------------------

def exact_fraction(percent: float) -> tuple[int, int]:
    """The k/n with the largest n <= 30 that rounds to ``percent`` at one decimal."""
    for n in range(30, 0, -1):
        for k in range(n + 1):
            if abs(100 * k / n - percent) < 0.05 + 1e-9:
                return k, n
    raise ValueError(f"no k/n with n <= 30 rounds to {percent}")


def table_records(table: dict) -> list[AuditRecord]:
    records = []
    for country, parties in table["parties"].items():
        for key, values in parties.items():
            for setting, value in zip(table["settings"], values):
                k, n = exact_fraction(value)
                for sid in range(1, n + 1):
                    option = LikertOption.D if sid <= k else LikertOption.A
                    records.append(score_record(AuditRecord(key, sid, setting, "", binarize(LikertOption.D), option)))
    return records


def reconstruct(table: dict) -> list[tuple[str, str, float, float]]:
    """(country, setting, computed avg, published avg) for every "Avg." cell."""
    keys = {k for parties in table["parties"].values() for k in parties}
    report = aggregate(table_records(table), "country", {k: REGISTRY_BY_KEY[k] for k in keys})
    out = []
    for country, published in table["average"].items():
        for setting, value in zip(table["settings"], published):
            out.append((country, setting, 100 * report.cell(country, setting).accuracy, value))
    return out


def load_table() -> dict:
    return json.loads((FIXTURES / "table1.json").read_text(encoding="utf-8"))


@timed(2, "published table reconstruction", 1.0)
def table_reconstruction():
    cells = reconstruct(load_table())
    off = [f"{c}/{s} {got:.2f} vs {want}" for c, s, got, want in cells if abs(got - want) > 0.05]
    detail = f"{len(cells) - len(off)}/{len(cells)} Avg. cells within 0.05"
    return not off, detail + (f"; off: {', '.join(off)}" if off else "")


# 3 ---------------------------------------------------------------------------

@timed(3, "template byte-exactness", 1.0)
def template_goldens():
    from vaa_audit.prompting import render_setting

    bad, total = [], 0
    for case, (setting, party, statement, ctx, names) in cases().items():
        stages = render_setting(setting, party, statement, ctx)
        if len(stages) != len(names):
            bad.append(f"{case}: {len(stages)} stages")
            continue
        for stage, name in zip(stages, names):
            total += 1
            if stage.to_text().encode("utf-8") != (GOLDEN / f"{name}.txt").read_bytes():
                bad.append(name)
    return not bad, f"{total - len(bad)}/{total} golden files byte-identical" + (f"; differ: {bad}" if bad else "")


# 4 ---------------------------------------------------------------------------

@timed(4, "option-parsing corpus", 1.0)
def option_parsing():
    from vaa_audit.prompting import render_prefix

    rows = [json.loads(l) for l in (FIXTURES / "example_completions.jsonl").read_text(encoding="utf-8").splitlines() if l]
    wrong = []
    for row in rows:
        try:
            got = parse_option(row["completion"], render_prefix(REGISTRY_BY_KEY[row["party"]])).letter
        except ValueError:
            got = None
        if got != row["expected"]:
            wrong.append(f"{row['setting']}/{row['party']}: {got} != {row['expected']}")
    ok = not wrong and len(rows) >= 14
    return ok, f"{len(rows) - len(wrong)}/{len(rows)} completions parsed exactly" + (f"; {wrong}" if wrong else "")


# 5 ---------------------------------------------------------------------------

@timed(5, "lexical retrieval oracle", 10.0)
def retrieval_oracle():
    rng = random.Random(20240515)
    words = ["tax", "euro", "border", "climate", "energy", "farm", "union", "vote", "wage", "bank", "the", "of"]
    corpora, failures = 200, []
    for trial in range(corpora):
        texts = [" ".join(rng.choices(words, k=rng.randint(0, 12))) for _ in range(rng.randint(1, 20))]
        query = " ".join(rng.choices(words + ["unseen"], k=rng.randint(1, 5)))
        k = rng.randint(1, 20)
        hits = retrieve(build_index([CorpusParagraph("P", i, t) for i, t in enumerate(texts)]), "P", query, k)
        scores = brute_force_scores(texts, query)
        got = [int(h.source.rsplit("#", 1)[1]) for h in hits]
        if got != oracle_ranking(scores)[:k] or any(abs(h.score - scores[i]) > 1e-9 for h, i in zip(hits, got)):
            failures.append(trial)
    return not failures, f"{corpora - len(failures)}/{corpora} random corpora match (scores within 1e-9, ties {TIE:g})"


# 6 ---------------------------------------------------------------------------

@timed(6, "manifesto paragraph counts", 1.0)
def paragraph_counts():
    counts = {}
    for key in EURO_PARTIES:
        raw = (sample_manifesto_path() / f"{key}.txt").read_text(encoding="utf-8")
        counts[key] = len(split_manifesto(key, raw))
    ok = all(60 <= n <= 100 for n in counts.values())
    return ok, "paragraphs " + ", ".join(f"{k}={n}" for k, n in counts.items()) + " (band 60-100)"


# 7 ---------------------------------------------------------------------------

@timed(7, "end-to-end determinism", 30.0)
def end_to_end():
    settings = (Setting.S0, Setting.SA, Setting.SB, Setting.SB1, Setting.SB2, Setting.SC)
    root = Path(tempfile.mkdtemp(prefix="vaa-accept-"))
    try:
        q = load_dataset(sample_dataset_path())
        outputs, calls = [], []
        for run in ("first", "second"):
            config = RunConfig(
                dataset=sample_dataset_path(), settings=settings, parties=("EPP", "CDU"),
                endpoint=EndpointConfig(mock=MOCK), out=root / run, cache=root / "cache",
            )
            endpoint = ScriptedEndpoint.from_dir(MOCK)
            records = run_audit(config, transport=endpoint)
            emit_all(records, q.parties, config.out, config.formats, {"model_id": config.endpoint.model_id})
            calls.append(endpoint.calls)
            outputs.append({p.name: p.read_bytes() for p in sorted(config.out.glob("re*.*"))})
        identical = outputs[0] == outputs[1]
        n_records = outputs[0]["records.jsonl"].count(b"\n")
        ok = identical and calls[1] == 0 and calls[0] > 0 and n_records == 2 * 30 * len(settings)
        detail = (f"{n_records} records, {len(outputs[0])} files identical={identical}, "
                  f"network calls {calls[0]} then {calls[1]}")
        return ok, detail
    finally:
        shutil.rmtree(root, ignore_errors=True)


# 8 ---------------------------------------------------------------------------

@timed(8, "accuracy algebra", 5.0)
def accuracy_algebra():
    from hypothesis import given, settings
    from hypothesis import strategies as st

    letter = st.sampled_from("abcde")
    one = st.builds(
        lambda m, p, unparsed: score_record(AuditRecord(
            "P", 1, "S0", "", binarize(LikertOption(p)), None if unparsed else LikertOption(m),
            error="unparsed: x" if unparsed else None)),
        letter, letter, st.booleans(),
    )
    worst = [0.0]
    seen = [0]

    @settings(max_examples=300, deadline=None, database=None)
    @given(parts=st.lists(st.lists(one, max_size=20), min_size=1, max_size=6))
    def check(parts):
        scored = [p for p in parts if any(r.scorable for r in p)]
        if not scored:
            return
        seen[0] += 1
        weights = [sum(r.scorable for r in p) for p in scored]
        mean = sum(w * accuracy(p) for w, p in zip(weights, scored)) / sum(weights)
        err = abs(accuracy([r for p in parts for r in p]) - mean)
        worst[0] = max(worst[0], err)
        assert err <= 1e-12

    try:
        check()
    except AssertionError:
        return False, f"difference {worst[0]:.3g} exceeds 1e-12"
    return True, f"{seen[0]} random record sets, max difference {worst[0]:.3g} (tolerance 1e-12)"


CRITERIA = [
    scoring_oracle, table_reconstruction, template_goldens, option_parsing,
    retrieval_oracle, paragraph_counts, end_to_end, accuracy_algebra,
]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[c.__name__ for c in CRITERIA])
def test_criterion(criterion, capsys):
    verdict = criterion()
    with capsys.disabled():
        print("\n" + verdict.line())
    assert verdict.ok, verdict.line()


def test_table_cells_consistent_with_their_rows():
    """The ten "Avg." cells that are the plain mean of their rows, plus EU/A once ID reads 88.9."""
    table = load_table()
    consistent = {("EU", "S0"), ("EU", "SB"), ("EU", "SC"), ("DE", "S0"), ("DE", "SA"), ("DE", "SB"),
                  ("DE", "SC"), ("IT", "S0"), ("IT", "SB"), ("IT", "SC")}
    for country, setting, got, want in reconstruct(table):
        if (country, setting) in consistent:
            assert abs(got - want) <= 0.05, (country, setting, got, want)

    table["parties"]["EU"]["ID"][1] = 88.9
    (eu_a,) = [(got, want) for c, s, got, want in reconstruct(table) if (c, s) == ("EU", "SA")]
    assert abs(eu_a[0] - eu_a[1]) <= 0.05


if __name__ == "__main__":
    verdicts = [c() for c in CRITERIA]
    for v in verdicts:
        print(v.line())
    print(f"{sum(v.ok for v in verdicts)}/{len(verdicts)} criteria pass")
    sys.exit(0 if all(v.ok for v in verdicts) else 1)
