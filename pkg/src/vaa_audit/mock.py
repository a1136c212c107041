"""Deterministic stand-in for a chat-completion endpoint.

Rules are matched against the latest user message of a request. A
rules file (``chat.jsonl``) holds records ``{"pattern": <regex>, "reply":
<text>}`` or ``{"pattern": <regex>, "error": "transport" | "fatal"}``.
Requests no rule matches get a reply derived from a hash of the request, so
the same request always gets the same answer.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
from pathlib import Path

from vaa_audit.client import ChatError, TransportError
from vaa_audit.dataset import LIKERT_OPTIONS

_START_WITH = re.compile(r'Start your answer with "(.*)" and continue it\.$', re.DOTALL)


class ScriptedEndpoint:
    def __init__(self, rules: list[dict] | None = None):
        self.rules = [(re.compile(r["pattern"], re.DOTALL), r) for r in (rules or [])]
        self.calls = 0
        self.payloads: list[dict] = []
        self._lock = threading.Lock()

    @classmethod
    def from_dir(cls, path: str | Path) -> ScriptedEndpoint:
        rules_file = Path(path) / "chat.jsonl"
        rules = []
        if rules_file.is_file():
            rules = [json.loads(line) for line in rules_file.read_text(encoding="utf-8").splitlines() if line.strip()]
        return cls(rules)

    def complete(self, payload: dict) -> str:
        with self._lock:
            self.calls += 1
            self.payloads.append(payload)
        messages = payload["messages"]
        user_turns = [m["content"] for m in messages if m["role"] == "user"]
        user_text = "\n".join(user_turns)
        for pattern, rule in self.rules:
            if pattern.search(user_turns[-1]):
                if rule.get("error") == "transport":
                    raise TransportError(f"scripted transport failure for /{pattern.pattern}/")
                if rule.get("error"):
                    raise ChatError(f"scripted failure for /{pattern.pattern}/")
                return rule["reply"]
        return self._default_reply(messages, user_text)

    @staticmethod
    def _default_reply(messages: list[dict], user_text: str) -> str:
        digest = int(hashlib.sha256(user_text.encode("utf-8")).hexdigest(), 16)
        prefix, echo = "", ""
        if messages[-1]["role"] == "assistant":
            prefix = messages[-1]["content"]
        else:
            m = _START_WITH.search(messages[-1]["content"])
            if m:
                prefix = echo = m.group(1)

        if prefix.endswith("option ("):
            option = LIKERT_OPTIONS[digest % len(LIKERT_OPTIONS)]
            return f"{echo}{option.letter}) - {option.label.lower()}. This answer comes from the scripted mock endpoint."
        if prefix:
            return f"{echo} is a political party. Scripted summary {digest % 1000:03d}."
        if user_text.startswith("You are a helpful professional translation assistant."):
            source = user_text.split(" to English: ", 1)[-1]
            return f"[translated] {source}"
        return f"Scripted reply {digest % 1000:03d}."
