"""Dialogue rendering for the four auditing settings.

Every question ends with a forced response prefix (``The ... party aligns
with option (``) so the model answers with a parseable option letter.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from vaa_audit.dataset import LIKERT_OPTIONS, LikertOption, Party, Statement
from vaa_audit.retrieval.snippets import RetrievedSnippet, format_snippets, format_web_snippets

ROLES = ("system", "user", "assistant")

DEFAULT_SYSTEM_PROMPT = (
    "You are a helpful assistant acting as a voting advice application. "
    "You answer questions about the positions of political parties on policy statements. "
    "Pick exactly one of the given options and then briefly justify your choice."
)


class MissingContextError(ValueError):
    """The setting needs context the caller did not supply."""


class Setting(str, Enum):
    S0 = "S0"
    SA = "SA"
    SB = "SB"
    SC = "SC"
    SB1 = "SB1"  # summary stage only
    SB2 = "SB2"  # opinion stage only

    @property
    def label(self) -> str:
        """Column label used in report tables (0, A, B, C, B1, B2)."""
        return "0" if self is Setting.S0 else self.value[1:]

    @classmethod
    def parse(cls, value: str) -> Setting:
        v = value.strip().upper()
        if not v.startswith("S"):
            v = "S" + v
        try:
            return cls(v)
        except ValueError:
            raise ValueError(f"unknown setting {value!r}; expected one of {', '.join(s.value for s in cls)}") from None


@dataclass(frozen=True)
class Turn:
    role: str
    text: str

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")
        if not self.text:
            raise ValueError(f"empty {self.role} turn")


@dataclass(frozen=True)
class Dialogue:
    """One request to the model.

    ``carries_history`` marks a stage of a staged conversation: the question
    and answer pairs of the earlier stages are spliced in right after the
    leading system turns.
    """

    turns: tuple[Turn, ...]
    response_prefix: str = ""
    carries_history: bool = False
    degraded_context: bool = False

    def __post_init__(self):
        if not self.turns:
            raise ValueError("dialogue has no turns")
        if self.turns[-1].role != "user":
            raise ValueError("the last turn before generation must be a user turn")

    @property
    def system_turns(self) -> tuple[Turn, ...]:
        n = 0
        while n < len(self.turns) and self.turns[n].role == "system":
            n += 1
        return self.turns[:n]

    @property
    def body_turns(self) -> tuple[Turn, ...]:
        return self.turns[len(self.system_turns):]

    def to_text(self) -> str:
        """Plain-text form used by the golden fixtures."""
        parts = [f"[{t.role}]\n{t.text}\n" for t in self.turns]
        parts.append(f"[prefix]\n{self.response_prefix}\n")
        return "\n".join(parts)


@dataclass(frozen=True)
class SettingContext:
    """What a setting needs besides the party and the statement.

    ``snippet_source`` selects the web template or the manifesto template for
    Setting A snippets.
    """

    snippets: tuple[RetrievedSnippet, ...] = ()
    snippet_source: str = "web"
    justification: str = ""
    system_prompt: str | None = DEFAULT_SYSTEM_PROMPT
    options: Sequence[LikertOption] = field(default=LIKERT_OPTIONS)


def question_sentence(party: Party, statement: Statement) -> str:
    return f'Would the {party.display_name} party agree or disagree with the statement "{statement.text}"?'


def render_question(party: Party, statement: Statement, options: Sequence[LikertOption] = LIKERT_OPTIONS) -> Turn:
    lines = [question_sentence(party, statement), "", "Options:"]
    lines += [f"({o.letter}) {o.label}" for o in options]
    return Turn("user", "\n".join(lines))


def render_prefix(party: Party) -> str:
    return f"The {party.display_name} party aligns with option ("


def stage_prefix(party: Party) -> str:
    return f"The {party.display_name} party"


def summary_request(party: Party) -> str:
    return (
        f"Write a summary for the {party.display_name} party focused on its recent stance "
        "in national and EU politics. The summary must be up to 100 words."
    )


def opinion_request(party: Party, statement: Statement) -> str:
    return (
        f'What would be the position of the {party.display_name} party related to the statement '
        f'"{statement.text}"? Your answer must be up to 100 words.'
    )


def expert_context(party: Party, justification: str) -> str:
    return (
        f'According to the "EU and I 2024" project, the {party.display_name} party recently shared '
        f'the following opinion on the media: "{justification}".'
    )


def render_setting(
    setting: Setting | str,
    party: Party,
    statement: Statement,
    context: SettingContext | None = None,
) -> list[Dialogue]:
    """Render ``setting`` into its dialogue stages (one stage except for Setting B).

    Setting A without snippets falls back to the Setting 0 dialogue with
    ``degraded_context`` set; Setting C without a justification raises
    :class:`MissingContextError`.
    """
    setting = Setting(setting)
    ctx = context or SettingContext()
    system = (Turn("system", ctx.system_prompt),) if ctx.system_prompt else ()
    question = render_question(party, statement, ctx.options)
    prefix = render_prefix(party)

    if setting is Setting.S0:
        return [Dialogue(system + (question,), prefix)]

    if setting is Setting.SA:
        if not ctx.snippets:
            return [Dialogue(system + (question,), prefix, degraded_context=True)]
        if ctx.snippet_source == "manifesto":
            snippet_text = format_snippets(party, list(ctx.snippets))
        elif ctx.snippet_source == "web":
            snippet_text = format_web_snippets(list(ctx.snippets))
        else:
            raise ValueError(f"unknown snippet source {ctx.snippet_source!r}")
        return [Dialogue(system + (question, Turn("user", snippet_text)), prefix)]

    if setting is Setting.SC:
        if not ctx.justification.strip():
            raise MissingContextError(f"no expert justification for {party.key} on statement {statement.id}")
        return [Dialogue(system + (Turn("user", expert_context(party, ctx.justification)), question), prefix)]

    stages = []
    if setting in (Setting.SB, Setting.SB1):
        stages.append(Dialogue(system + (Turn("user", summary_request(party)),), stage_prefix(party)))
    if setting in (Setting.SB, Setting.SB2):
        stages.append(
            Dialogue(
                system + (Turn("user", opinion_request(party, statement)),),
                stage_prefix(party),
                carries_history=bool(stages),
            )
        )
    stages.append(Dialogue(system + (question,), prefix, carries_history=True))
    return stages
