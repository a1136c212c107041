"""Run the auditing settings over a party and statement selection.

Each (party, statement, setting) item renders its dialogue(s), queries the
model and scores the answer. Items run on a bounded thread pool; stages of
one item run in sequence. Finished records are appended to
``records.partial.jsonl`` as they complete, and ``records.jsonl`` is written
in canonical order once the run ends. Responses are cached by content, so a
rerun after an interruption only queries what is still missing.
"""

from __future__ import annotations

import json
import logging
import os
import threading
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

from vaa_audit.client import ChatClient, HTTPTransport, ResponseCache, StageError, Transport
from vaa_audit.dataset import DatasetError, Party, PartyAnswer, Questionnaire, Statement, load_dataset
from vaa_audit.harness.config import ConfigError, RunConfig
from vaa_audit.mock import ScriptedEndpoint
from vaa_audit.prompting import MissingContextError, Setting, SettingContext, question_sentence, render_prefix, render_setting
from vaa_audit.retrieval import (
    EmbeddingBackend,
    FixtureSearchBackend,
    HTTPSearchBackend,
    Index,
    LexicalBackend,
    SearchError,
    build_index,
    load_corpus,
    retrieve,
    web_search,
)
from vaa_audit.retrieval.search import SearchBackend
from vaa_audit.scoring import (
    MISSING_CONTEXT,
    TRANSPORT,
    UNPARSED,
    AuditRecord,
    UnparsedResponse,
    binarize,
    parse_option,
    score_record,
    write_records,
)

logger = logging.getLogger(__name__)

RECORDS_FILE = "records.jsonl"
PARTIAL_FILE = "records.partial.jsonl"
RESUME_MARKER = "RESUME.json"
MANIFEST_FILE = "run.json"


class AuditAborted(RuntimeError):
    def __init__(self, message: str, partial: Path, marker: Path):
        self.partial = partial
        self.marker = marker
        super().__init__(message)


@dataclass(frozen=True)
class WorkItem:
    party: Party
    statement: Statement
    answer: PartyAnswer
    setting: Setting


def select_parties(q: Questionnaire, config: RunConfig) -> list[Party]:
    if config.parties:
        known = {p.key for p in q.parties}
        missing = [k for k in config.parties if k not in known]
        if missing:
            raise ConfigError(f"unknown party key(s) {missing}")
        wanted = set(config.parties)
        selected = [p for p in q.parties if p.key in wanted]
    elif config.countries:
        selected = [p for p in q.parties if p.country_code in config.countries]
    else:
        selected = list(q.parties)
    if not selected:
        raise ConfigError("the party selection is empty")
    return selected


def work_items(q: Questionnaire, parties: list[Party], settings) -> list[WorkItem]:
    items = []
    for party in parties:
        for answer in q.answers_for(party.key):
            statement = q.statement(answer.statement_id)
            for setting in settings:
                items.append(WorkItem(party, statement, answer, Setting(setting)))
    return items


class _Auditor:
    def __init__(self, config: RunConfig, client: ChatClient, search: SearchBackend | None, index: Index | None):
        self.config = config
        self.client = client
        self.search = search
        self.index = index

    def context(self, item: WorkItem) -> SettingContext:
        base = SettingContext(system_prompt=self.config.system_prompt)
        if item.setting is Setting.SC:
            return SettingContext(justification=item.answer.justification_english, system_prompt=base.system_prompt)
        if item.setting is not Setting.SA:
            return base
        r = self.config.retrieval
        snippets = ()
        if r.source == "curated":
            if self.index is not None and item.party.key in self.index:
                snippets = tuple(retrieve(self.index, item.party.key, item.statement.text, r.k))
            return SettingContext(snippets=snippets, snippet_source="manifesto", system_prompt=base.system_prompt)
        try:
            snippets = tuple(
                web_search(
                    self.search,
                    question_sentence(item.party, item.statement),
                    r.web_limit,
                    party=item.party.key,
                    retries=self.config.endpoint.retries,
                    backoff=self.config.endpoint.backoff,
                    sleep=self.client.sleep,
                )
            )
        except SearchError as e:
            logger.warning("web search failed for %s/%s: %s", item.party.key, item.statement.id, e)
        return SettingContext(snippets=snippets, snippet_source="web", system_prompt=base.system_prompt)

    def run(self, item: WorkItem) -> AuditRecord:
        record = AuditRecord(
            party=item.party.key,
            statement_id=item.statement.id,
            setting=item.setting.value,
            raw_response="",
            party_stance=binarize(item.answer.answer),
        )
        ctx = self.context(item)
        sources = tuple(s.source for s in ctx.snippets)
        try:
            stages = render_setting(item.setting, item.party, item.statement, ctx)
        except MissingContextError as e:
            return self.score(replace(record, error=f"{MISSING_CONTEXT}: {e}"))
        record = replace(record, degraded_context=stages[0].degraded_context, context_sources=sources)

        try:
            responses = self.client.run_staged(stages)
        except StageError as e:
            return self.score(
                replace(record, error=f"{TRANSPORT}: {e}", stage_responses=tuple(r.text for r in e.responses))
            )
        final = responses[-1].text
        record = replace(record, raw_response=final, stage_responses=tuple(r.text for r in responses[:-1]))
        try:
            record = replace(record, parsed_option=parse_option(final, render_prefix(item.party)))
        except UnparsedResponse as e:
            record = replace(record, error=f"{UNPARSED}: {e}")
        return self.score(record)

    def score(self, record: AuditRecord) -> AuditRecord:
        return score_record(
            record,
            exclude_party_neutral=self.config.exclude_party_neutral,
            model_neutral_is_mismatch=self.config.model_neutral_is_mismatch,
        )


def _make_transport(config: RunConfig) -> Transport:
    if config.endpoint.mock is not None:
        return ScriptedEndpoint.from_dir(config.endpoint.mock)
    return HTTPTransport(
        config.endpoint.base_url,
        api_key=os.environ.get(config.endpoint.api_key_env),
        timeout=config.endpoint.timeout,
    )


def _make_search(config: RunConfig) -> SearchBackend | None:
    r = config.retrieval
    if r.search == "http" and r.search_url:
        return HTTPSearchBackend(r.search_url, api_key=os.environ.get(config.endpoint.api_key_env))
    if r.search_fixtures is not None:
        return FixtureSearchBackend(r.search_fixtures)
    if config.endpoint.mock is not None and (Path(config.endpoint.mock) / "search.jsonl").is_file():
        return FixtureSearchBackend(Path(config.endpoint.mock) / "search.jsonl")
    return None


def make_scorer_backend(config: RunConfig):
    r = config.retrieval
    if r.backend == "embedding":
        return EmbeddingBackend(r.embedding_url, r.embedding_model, api_key=os.environ.get(config.endpoint.api_key_env))
    return LexicalBackend()


def _make_index(config: RunConfig) -> Index | None:
    r = config.retrieval
    backend = make_scorer_backend(config)
    if r.index is not None:
        return Index.load(r.index, backend)
    return build_index(load_corpus(r.corpus), backend)


def run_audit(
    config: RunConfig,
    *,
    transport: Transport | None = None,
    search: SearchBackend | None = None,
    index: Index | None = None,
) -> list[AuditRecord]:
    """Audit every selected (party, answered statement, setting) triple.

    Configuration problems raise :class:`ConfigError` before any request is
    sent. When ``max_consecutive_failures`` requests in a row fail at the
    transport level the run stops with :class:`AuditAborted`, leaving the
    partial record file and a resume marker in the output directory.
    """
    config.validate()
    try:
        q = load_dataset(config.dataset)
    except DatasetError as e:
        raise ConfigError(f"dataset: {e}") from e
    parties = select_parties(q, config)
    items = work_items(q, parties, config.settings)

    if Setting.SA in config.settings:
        if config.retrieval.source == "curated" and index is None:
            try:
                index = _make_index(config)
            except (OSError, ValueError) as e:
                raise ConfigError(f"retrieval index: {e}") from e
        if config.retrieval.source == "web" and search is None:
            search = _make_search(config)
            if search is None:
                raise ConfigError("Setting A with web retrieval needs search fixtures or a search URL")

    client = ChatClient(
        transport=transport or _make_transport(config),
        model_id=config.endpoint.model_id,
        temperature=config.temperature,
        max_tokens=config.max_tokens,
        prefix_mode=config.endpoint.prefix_mode,
        merge_user_turns=config.endpoint.merge_user_turns,
        cache=ResponseCache(config.cache_dir),
        retries=config.endpoint.retries,
        backoff=config.endpoint.backoff,
    )
    auditor = _Auditor(config, client, search, index)

    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    partial_path = out / PARTIAL_FILE
    marker_path = out / RESUME_MARKER
    started = datetime.now(timezone.utc).isoformat(timespec="seconds")

    results: dict[int, AuditRecord] = {}
    write_lock = threading.Lock()
    stop = threading.Event()
    streak = [0]  # consecutive transport failures, guarded by write_lock

    with partial_path.open("w", encoding="utf-8", newline="\n") as partial:

        def task(i: int, item: WorkItem) -> None:
            if stop.is_set():
                return
            record = auditor.run(item)
            with write_lock:
                results[i] = record
                partial.write(json.dumps(record.to_dict(), ensure_ascii=False, sort_keys=True) + "\n")
                partial.flush()
                streak[0] = streak[0] + 1 if record.error_kind == TRANSPORT else 0
                if streak[0] >= config.max_consecutive_failures:
                    stop.set()

        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            futures = [pool.submit(task, i, item) for i, item in enumerate(items)]
            for fut in as_completed(futures):
                fut.result()
                if stop.is_set():
                    for f in futures:
                        f.cancel()
                    break

    if stop.is_set():
        _write_marker(marker_path, config, len(items), results, reason="aborted after repeated endpoint failures")
        raise AuditAborted(
            f"endpoint failed {config.max_consecutive_failures} times in a row; {len(results)}/{len(items)} records kept in {partial_path}",
            partial_path,
            marker_path,
        )

    records = [results[i] for i in range(len(items))]
    write_records(records, out / RECORDS_FILE)
    partial_path.unlink()
    failed = [r for r in records if r.error_kind == TRANSPORT]
    if failed:
        _write_marker(marker_path, config, len(items), results, reason=f"{len(failed)} request(s) failed")
    elif marker_path.exists():
        marker_path.unlink()

    manifest = {
        "model_id": config.endpoint.model_id,
        "config_digest": config.digest(),
        "prefix_mode": config.endpoint.prefix_mode,
        "settings": [s.value for s in config.settings],
        "parties": [p.key for p in parties],
        "records": len(records),
        "started_at": started,
        "finished_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    (out / MANIFEST_FILE).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return records


def _write_marker(path: Path, config: RunConfig, total: int, results: dict, reason: str) -> None:
    failed = sorted(
        f"{r.party}/{r.statement_id}/{r.setting}" for r in results.values() if r.error_kind == TRANSPORT
    )
    marker = {
        "reason": reason,
        "config_digest": config.digest(),
        "completed": len(results),
        "total": total,
        "failed": failed,
    }
    path.write_text(json.dumps(marker, indent=2) + "\n", encoding="utf-8")
