"""Run configuration and its INI-style file format.

Example::

    [run]
    dataset = data/euandi_2024
    settings = S0, SA, SB, SC
    countries = DE, EU
    workers = 4
    out = runs/mixtral

    [endpoint]
    base_url = http://localhost:8000/v1
    model_id = mistralai/Mixtral-8x7B-Instruct-v0.1

    [retrieval]
    source = curated
    corpus = manifestos/
"""

from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from vaa_audit.client import DEFAULT_MAX_TOKENS, DEFAULT_TEMPERATURE, PREFIX_MODES
from vaa_audit.dataset import COUNTRY_CODES
from vaa_audit.prompting import DEFAULT_SYSTEM_PROMPT, Setting
from vaa_audit.retrieval.index import DEFAULT_K
from vaa_audit.retrieval.search import DEFAULT_WEB_LIMIT

REPORT_FORMATS = ("table-text", "delimited-values", "structured-records")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class EndpointConfig:
    base_url: str = "http://localhost:8000/v1"
    model_id: str = "mistralai/Mixtral-8x7B-Instruct-v0.1"
    api_key_env: str = "VAA_API_KEY"
    prefix_mode: str = "assistant"
    merge_user_turns: bool = False
    timeout: float = 120.0
    retries: int = 3
    backoff: float = 1.0
    mock: Path | None = None


@dataclass(frozen=True)
class RetrievalConfig:
    source: str = "web"  # web | curated
    backend: str = "lexical"  # lexical | embedding
    corpus: Path | None = None
    index: Path | None = None
    k: int = DEFAULT_K
    web_limit: int = DEFAULT_WEB_LIMIT
    search: str = "fixture"  # fixture | http
    search_fixtures: Path | None = None
    search_url: str | None = None
    embedding_url: str | None = None
    embedding_model: str = "sentence-transformers/all-mpnet-base-v2"


@dataclass(frozen=True)
class RunConfig:
    dataset: Path
    settings: tuple[Setting, ...] = (Setting.S0,)
    countries: tuple[str, ...] = ()
    parties: tuple[str, ...] = ()
    endpoint: EndpointConfig = field(default_factory=EndpointConfig)
    retrieval: RetrievalConfig = field(default_factory=RetrievalConfig)
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int = DEFAULT_MAX_TOKENS
    workers: int = 4
    cache: Path | None = None
    out: Path = Path("runs/latest")
    formats: tuple[str, ...] = REPORT_FORMATS
    system_prompt: str = DEFAULT_SYSTEM_PROMPT
    exclude_party_neutral: bool = True
    model_neutral_is_mismatch: bool = True
    max_consecutive_failures: int = 10

    @property
    def cache_dir(self) -> Path:
        return self.cache if self.cache is not None else self.out / "cache"

    def validate(self) -> None:
        if not self.settings:
            raise ConfigError("select at least one setting")
        bad = [c for c in self.countries if c not in COUNTRY_CODES]
        if bad:
            raise ConfigError(f"unknown country code(s) {bad}; expected {', '.join(COUNTRY_CODES)}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.endpoint.prefix_mode not in PREFIX_MODES:
            raise ConfigError(f"prefix_mode must be one of {PREFIX_MODES}")
        for f in self.formats:
            if f not in REPORT_FORMATS:
                raise ConfigError(f"unknown report format {f!r}")
        r = self.retrieval
        if r.source not in ("web", "curated"):
            raise ConfigError("retrieval source must be 'web' or 'curated'")
        if r.k < 1 or r.web_limit < 1:
            raise ConfigError("retrieval k and web_limit must be >= 1")
        if Setting.SA in self.settings:
            if r.source == "curated" and r.corpus is None and r.index is None:
                raise ConfigError("Setting A with curated retrieval needs a corpus or an index")
            if r.source == "web" and r.search == "http" and not r.search_url:
                raise ConfigError("http web search needs search_url")
            if r.backend == "embedding" and r.source == "curated" and not r.embedding_url:
                raise ConfigError("embedding backend needs embedding_url")

    def digest(self) -> str:
        """Hash of everything that shapes the records; output and cache locations are left out."""
        data = asdict(replace(self, out=Path("."), cache=None))
        blob = json.dumps(data, default=str, sort_keys=True)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def _split_list(value: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in value.replace("\n", ",").split(",") if v.strip())


def _coerce(section: str, cls, raw: dict[str, str]) -> dict:
    types = {f.name: f.type for f in fields(cls)}
    out = {}
    for key, value in raw.items():
        if key not in types:
            raise ConfigError(f"unknown key {key!r} in [{section}]")
        t = str(types[key])
        try:
            if "bool" in t:
                out[key] = value.strip().lower() in ("1", "true", "yes", "on")
            elif t.startswith("int"):
                out[key] = int(value)
            elif t.startswith("float"):
                out[key] = float(value)
            elif "Path" in t:
                out[key] = Path(value) if value.strip() else None
            elif t.startswith("tuple"):
                out[key] = _split_list(value)
            else:
                out[key] = value
        except ValueError as e:
            raise ConfigError(f"[{section}] {key}: {e}") from e
    return out


def load_config(path: str | Path) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None)
    if not parser.read(path, encoding="utf-8"):
        raise ConfigError(f"cannot read config file {path}")
    unknown = set(parser.sections()) - {"run", "endpoint", "retrieval"}
    if unknown:
        raise ConfigError(f"unknown config section(s) {sorted(unknown)}")

    run = _coerce("run", RunConfig, dict(parser["run"])) if parser.has_section("run") else {}
    if "dataset" not in run or run["dataset"] is None:
        raise ConfigError("[run] dataset is required")
    if "settings" in run:
        try:
            run["settings"] = tuple(Setting.parse(s) for s in run["settings"])
        except ValueError as e:
            raise ConfigError(str(e)) from e
    if parser.has_section("endpoint"):
        run["endpoint"] = EndpointConfig(**_coerce("endpoint", EndpointConfig, dict(parser["endpoint"])))
    if parser.has_section("retrieval"):
        run["retrieval"] = RetrievalConfig(**_coerce("retrieval", RetrievalConfig, dict(parser["retrieval"])))
    return RunConfig(**run)
