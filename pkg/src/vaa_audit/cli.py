"""Command line entry point: ``vaa-audit {validate,index,audit,report,translate}``."""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from vaa_audit.client import ChatClient, ChatError, HTTPTransport, ResponseCache
from vaa_audit.dataset import DatasetError, export_dataset, load_dataset, sample_dataset_path, validate_dataset
from vaa_audit.harness.audit import MANIFEST_FILE, RECORDS_FILE, AuditAborted, make_scorer_backend, run_audit
from vaa_audit.harness.config import REPORT_FORMATS, ConfigError, RetrievalConfig, RunConfig, load_config
from vaa_audit.harness.report import DIMENSIONS, ReportError, aggregate, emit_report, render_table
from vaa_audit.mock import ScriptedEndpoint
from vaa_audit.prompting import Setting
from vaa_audit.retrieval import IndexBuildError, build_index, load_corpus
from vaa_audit.scoring import read_records

logger = logging.getLogger("vaa_audit")


def _csv(value: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in value.split(",") if v.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vaa-audit", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a dataset directory")
    p.add_argument("dataset", nargs="?", type=Path, default=None, help="dataset directory (default: bundled sample)")
    p.add_argument("--expect-statements", type=int, default=None)

    p = sub.add_parser("index", help="build a retrieval index from a manifesto corpus")
    p.add_argument("--corpus", type=Path, required=True, help="directory of {party_key}.txt manifestos")
    p.add_argument("--out", type=Path, required=True, help="index file to write")
    p.add_argument("--backend", choices=("lexical", "embedding"), default="lexical")
    p.add_argument("--embedding-url")
    p.add_argument("--embedding-model", default=RetrievalConfig.embedding_model)

    p = sub.add_parser("audit", help="run auditing settings against an endpoint")
    p.add_argument("--config", type=Path, help="INI run configuration; flags override it")
    p.add_argument("--dataset", type=Path)
    p.add_argument("--settings", type=_csv, help="comma-separated, e.g. S0,SA,SB,SC,SB1,SB2")
    p.add_argument("--countries", type=_csv)
    p.add_argument("--parties", type=_csv)
    p.add_argument("--mock", type=Path, help="use the scripted mock endpoint with fixtures from this directory")
    p.add_argument("--base-url")
    p.add_argument("--model")
    p.add_argument("--prefix-mode", choices=("assistant", "instruct"))
    p.add_argument("--rag", choices=("web", "curated"), help="context source for Setting A")
    p.add_argument("--corpus", type=Path)
    p.add_argument("--index", type=Path)
    p.add_argument("--search-fixtures", type=Path)
    p.add_argument("--k", type=int)
    p.add_argument("--web-limit", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--cache", type=Path)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("report", help="aggregate a record file into reports")
    p.add_argument("--records", type=Path, required=True)
    p.add_argument("--dataset", type=Path, default=None, help="dataset the records came from (default: bundled sample)")
    p.add_argument("--dimension", choices=DIMENSIONS, default="party")
    p.add_argument("--format", dest="formats", action="append", choices=REPORT_FORMATS)
    p.add_argument("--out", type=Path, help="directory for report files; omitted prints the table only")

    p = sub.add_parser("translate", help="translate non-English justifications to English")
    p.add_argument("--dataset", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True, help="directory for the translated dataset")
    p.add_argument("--mock", type=Path)
    p.add_argument("--base-url", default="http://localhost:8000/v1")
    p.add_argument("--model", default="mistralai/Mixtral-8x7B-Instruct-v0.1")
    p.add_argument("--api-key-env", default="VAA_API_KEY")
    p.add_argument("--cache", type=Path)
    return parser


def cmd_validate(args) -> int:
    path = args.dataset or sample_dataset_path()
    q = load_dataset(path)
    issues = validate_dataset(q, args.expect_statements)
    for issue in issues:
        print(issue)
    print(f"{path}: {len(q.statements)} statements, {len(q.parties)} parties, {len(q.answers)} answers, {len(issues)} issue(s)")
    return 1 if issues else 0


def cmd_index(args) -> int:
    retrieval = RetrievalConfig(backend=args.backend, embedding_url=args.embedding_url, embedding_model=args.embedding_model)
    if args.backend == "embedding" and not args.embedding_url:
        raise ConfigError("--embedding-url is required with the embedding backend")
    backend = make_scorer_backend(RunConfig(dataset=Path("."), retrieval=retrieval))
    index = build_index(load_corpus(args.corpus), backend)
    index.save(args.out)
    sizes = ", ".join(f"{k}={len(p.paragraphs)}" for k, p in sorted(index.partitions.items()))
    print(f"wrote {args.out} ({index.backend_id}): {sizes}")
    return 0


def _audit_config(args) -> RunConfig:
    if args.config:
        config = load_config(args.config)
    elif args.dataset:
        config = RunConfig(dataset=args.dataset)
    else:
        config = RunConfig(dataset=sample_dataset_path())
    run = {}
    if args.dataset:
        run["dataset"] = args.dataset
    if args.settings:
        try:
            run["settings"] = tuple(Setting.parse(s) for s in args.settings)
        except ValueError as e:
            raise ConfigError(str(e)) from e
    if args.countries:
        run["countries"] = tuple(c.upper() for c in args.countries)
    if args.parties:
        run["parties"] = args.parties
    for name in ("workers", "cache", "out"):
        if getattr(args, name) is not None:
            run[name] = getattr(args, name)

    endpoint = {}
    if args.mock:
        endpoint["mock"] = args.mock
    if args.base_url:
        endpoint["base_url"] = args.base_url
    if args.model:
        endpoint["model_id"] = args.model
    if args.prefix_mode:
        endpoint["prefix_mode"] = args.prefix_mode

    retrieval = {}
    for flag, key in (("rag", "source"), ("corpus", "corpus"), ("index", "index"), ("search_fixtures", "search_fixtures"),
                      ("k", "k"), ("web_limit", "web_limit")):
        if getattr(args, flag) is not None:
            retrieval[key] = getattr(args, flag)
    return replace(
        config,
        endpoint=replace(config.endpoint, **endpoint),
        retrieval=replace(config.retrieval, **retrieval),
        **run,
    )


def emit_all(records, parties, out: Path, formats, metadata) -> list[Path]:
    paths = []
    for dimension in DIMENSIONS:
        report = aggregate(records, dimension, parties, metadata)
        for fmt in formats:
            paths.append(emit_report(report, fmt, out))
    return paths


def _records_digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()[:16]


def cmd_audit(args) -> int:
    config = _audit_config(args)
    try:
        records = run_audit(config)
    except AuditAborted as e:
        print(f"audit aborted: {e}\nrerun the same command to resume (marker: {e.marker})", file=sys.stderr)
        return 3
    q = load_dataset(config.dataset)
    out = Path(config.out)
    metadata = {
        "model_id": config.endpoint.model_id,
        "config_digest": config.digest(),
        "records_digest": _records_digest(out / RECORDS_FILE),
    }
    emit_all(records, q.parties, out, config.formats, metadata)
    scored = sum(1 for r in records if r.matched is not None)
    print(f"wrote {len(records)} records ({scored} scorable) to {out / RECORDS_FILE}")
    print(render_table(aggregate(records, "setting_cross", q.parties, metadata)), end="")
    return 0


def cmd_report(args) -> int:
    records = read_records(args.records)
    q = load_dataset(args.dataset or sample_dataset_path())
    metadata = {"records_digest": _records_digest(args.records)}
    manifest = args.records.parent / MANIFEST_FILE
    if manifest.is_file():
        run = json.loads(manifest.read_text(encoding="utf-8"))
        metadata.update(model_id=run.get("model_id"), config_digest=run.get("config_digest"))
    report = aggregate(records, args.dimension, q.parties, metadata)
    if args.out:
        for fmt in args.formats or ["table-text"]:
            print(f"wrote {emit_report(report, fmt, args.out)}")
    print(render_table(report), end="")
    return 0


def cmd_translate(args) -> int:
    q = load_dataset(args.dataset)
    if args.mock:
        transport = ScriptedEndpoint.from_dir(args.mock)
    else:
        transport = HTTPTransport(args.base_url, api_key=os.environ.get(args.api_key_env))
    cache = ResponseCache(args.cache or args.out / "cache")
    client = ChatClient(transport=transport, model_id=args.model, cache=cache)
    answers = []
    translated = 0
    for a in q.answers:
        needs = a.justification_original.strip() and not a.justification_english.strip()
        if needs and a.justification_language.lower() == "en":
            a = replace(a, justification_english=a.justification_original)
        elif needs:
            a = replace(a, justification_english=client.translate(a.justification_original, a.justification_language))
            translated += 1
        answers.append(a)
    export_dataset(replace(q, answers=tuple(answers)), args.out)
    print(f"translated {translated} justification(s); wrote {args.out}")
    return 0


COMMANDS = {
    "validate": cmd_validate,
    "index": cmd_index,
    "audit": cmd_audit,
    "report": cmd_report,
    "translate": cmd_translate,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, DatasetError, IndexBuildError, ReportError, ChatError, OSError, ValueError) as e:
        print(f"vaa-audit {args.command}: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
