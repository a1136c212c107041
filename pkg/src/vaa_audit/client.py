"""Chat-completion client with an on-disk response cache.

The wire format is the common ``/chat/completions`` JSON interface: a model
id, a list of ``{"role", "content"}`` messages, ``temperature`` and
``max_tokens``. The response prefix goes out either as a trailing partial
assistant message (``prefix_mode="assistant"``) or as an instruction
appended to the last user message (``prefix_mode="instruct"``).
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol, Sequence

import httpx

from vaa_audit.prompting import Dialogue, Turn

logger = logging.getLogger(__name__)

DEFAULT_TEMPERATURE = 0.0
DEFAULT_MAX_TOKENS = 512
PREFIX_MODES = ("assistant", "instruct")

TRANSLATION_TEMPLATE = (
    "You are a helpful professional translation assistant. The translations must be faithful and "
    "accurate at a professional level meeting the highest European Commission official standards. "
    "Translate the following text from {source_language} to English: {text}"
)

LANGUAGE_NAMES = {
    "bg": "Bulgarian", "cs": "Czech", "da": "Danish", "de": "German", "el": "Greek", "en": "English",
    "es": "Spanish", "et": "Estonian", "fi": "Finnish", "fr": "French", "ga": "Irish", "hr": "Croatian",
    "hu": "Hungarian", "it": "Italian", "lt": "Lithuanian", "lv": "Latvian", "mt": "Maltese",
    "nl": "Dutch", "pl": "Polish", "pt": "Portuguese", "ro": "Romanian", "sk": "Slovak",
    "sl": "Slovenian", "sv": "Swedish", "ca": "Catalan", "eu": "Basque", "gl": "Galician",
}


class TransportError(RuntimeError):
    """Transient failure talking to the endpoint; retried."""


class ChatError(RuntimeError):
    """Terminal failure of one request."""


class StageError(ChatError):
    def __init__(self, stage: int, cause: Exception, responses: list[ChatResponse]):
        self.stage = stage
        self.responses = responses
        super().__init__(f"stage {stage} failed: {cause}")


@dataclass(frozen=True)
class ChatRequest:
    model_id: str
    turns: tuple[Turn, ...]
    response_prefix: str = ""
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int = DEFAULT_MAX_TOKENS

    def __post_init__(self):
        if not self.turns:
            raise ValueError("request has no turns")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be > 0")

    def cache_key(self) -> str:
        payload = {
            "model_id": self.model_id,
            "turns": [[t.role, t.text] for t in self.turns],
            "response_prefix": self.response_prefix,
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        }
        blob = json.dumps(payload, ensure_ascii=False, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class ChatResponse:
    text: str
    model_id: str
    cached: bool = False
    latency_ms: int = 0


class Transport(Protocol):
    def complete(self, payload: dict) -> str: ...


class HTTPTransport:
    """POST to ``{base_url}/chat/completions`` and return the message content."""

    def __init__(
        self,
        base_url: str,
        *,
        api_key: str | None = None,
        timeout: float = 120.0,
        client: httpx.Client | None = None,
    ):
        self.url = base_url.rstrip("/") + "/chat/completions"
        headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._client = client or httpx.Client(timeout=timeout, headers=headers)

    def complete(self, payload):
        try:
            resp = self._client.post(self.url, json=payload)
        except httpx.TransportError as e:
            raise TransportError(str(e)) from e
        if resp.status_code == 429 or resp.status_code >= 500:
            raise TransportError(f"HTTP {resp.status_code} from {self.url}")
        if resp.status_code >= 400:
            raise ChatError(f"HTTP {resp.status_code} from {self.url}: {resp.text[:200]}")
        try:
            return resp.json()["choices"][0]["message"]["content"] or ""
        except (ValueError, KeyError, IndexError, TypeError) as e:
            raise ChatError(f"malformed completion body: {e}") from e


class ResponseCache:
    """Directory of ``<digest>.json`` files, written atomically under a lock."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, key: str) -> dict | None:
        path = self._path(key)
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            return None
        except json.JSONDecodeError:
            logger.warning("ignoring corrupt cache entry %s", path)
            return None

    def put(self, key: str, value: dict) -> None:
        path = self._path(key)
        with self._lock:
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8") as f:
                json.dump(value, f, ensure_ascii=False, sort_keys=True)
            os.replace(tmp, path)


@dataclass
class ChatClient:
    transport: Transport
    model_id: str
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int = DEFAULT_MAX_TOKENS
    prefix_mode: str = "assistant"
    merge_user_turns: bool = False
    cache: ResponseCache | None = None
    retries: int = 3
    backoff: float = 1.0
    sleep: Callable[[float], None] = field(default=time.sleep, repr=False)
    _inflight: dict = field(default_factory=dict, init=False, repr=False)
    _inflight_lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)

    def __post_init__(self):
        if self.prefix_mode not in PREFIX_MODES:
            raise ValueError(f"prefix_mode must be one of {PREFIX_MODES}")

    def _key_lock(self, key: str) -> threading.Lock:
        with self._inflight_lock:
            return self._inflight.setdefault(key, threading.Lock())

    def request(self, turns: Sequence[Turn], response_prefix: str = "") -> ChatRequest:
        return ChatRequest(self.model_id, tuple(turns), response_prefix, self.temperature, self.max_tokens)

    def payload(self, request: ChatRequest) -> dict:
        messages = [{"role": t.role, "content": t.text} for t in request.turns]
        if self.merge_user_turns:
            merged = []
            for m in messages:
                if merged and merged[-1]["role"] == m["role"] == "user":
                    merged[-1] = {"role": "user", "content": merged[-1]["content"] + "\n\n" + m["content"]}
                else:
                    merged.append(m)
            messages = merged
        if request.response_prefix:
            if self.prefix_mode == "assistant":
                messages.append({"role": "assistant", "content": request.response_prefix})
            else:
                last = messages[-1]
                messages[-1] = {
                    **last,
                    "content": f'{last["content"]}\n\nStart your answer with "{request.response_prefix}" and continue it.',
                }
        return {
            "model": request.model_id,
            "messages": messages,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }

    def chat(self, request: ChatRequest) -> ChatResponse:
        """Answer ``request`` from the cache or the endpoint.

        Identical requests issued concurrently wait for the first one, so a
        shared stage (such as a party summary) is only sent once.
        """
        key = request.cache_key()
        if self.cache is None:
            return self._fetch(request, key)
        with self._key_lock(key):
            return self._fetch(request, key)

    def _fetch(self, request: ChatRequest, key: str) -> ChatResponse:
        if self.cache is not None:
            hit = self.cache.get(key)
            if hit is not None:
                return ChatResponse(text=hit["text"], model_id=hit["model_id"], cached=True)

        payload = self.payload(request)
        started = time.monotonic()
        for attempt in range(self.retries + 1):
            try:
                completion = self.transport.complete(payload)
                break
            except TransportError as e:
                if attempt == self.retries:
                    raise ChatError(f"endpoint unavailable after {self.retries + 1} attempts: {e}") from e
                delay = self.backoff * 2**attempt
                logger.warning("chat attempt %d failed (%s); retrying in %.1fs", attempt + 1, e, delay)
                self.sleep(delay)

        prefix = request.response_prefix
        if prefix and self.prefix_mode == "assistant" and not completion.startswith(prefix):
            text = prefix + completion
        else:
            text = completion
        if not completion.strip():
            raise ChatError("endpoint returned an empty completion")

        response = ChatResponse(
            text=text, model_id=request.model_id, latency_ms=int((time.monotonic() - started) * 1000)
        )
        if self.cache is not None:
            self.cache.put(key, {"text": text, "model_id": request.model_id})
        return response

    def run_staged(self, stages: Sequence[Dialogue]) -> list[ChatResponse]:
        """Run dialogue stages in order, splicing earlier question/answer pairs into later ones.

        Raises :class:`StageError` (1-based stage number) on the first failure,
        carrying the responses collected so far.
        """
        history: list[Turn] = []
        responses: list[ChatResponse] = []
        for n, stage in enumerate(stages, start=1):
            if n > 1 and not stage.carries_history:
                raise ValueError(f"stage {n} does not declare where earlier answers go")
            turns = stage.system_turns + tuple(history) + stage.body_turns
            try:
                resp = self.chat(self.request(turns, stage.response_prefix))
            except ChatError as e:
                raise StageError(n, e, responses) from e
            responses.append(resp)
            history.extend(stage.body_turns)
            history.append(Turn("assistant", resp.text))
        return responses

    def translate(self, text: str, source_language: str) -> str:
        if not text.strip():
            raise ValueError("nothing to translate")
        language = LANGUAGE_NAMES.get(source_language.lower(), source_language)
        prompt = TRANSLATION_TEMPLATE.format(source_language=language, text=text)
        return self.chat(self.request([Turn("user", prompt)])).text
