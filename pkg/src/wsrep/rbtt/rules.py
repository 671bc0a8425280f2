"""Tagging rules and their one-line-per-rule text format.

A rule line reads::

    id TYPE trigger=<alt,alt,...> stop=<alt,...> constraints=<c,...>

Each ``alt`` is a ``+``-joined sequence of matchers: ``lemma:word``,
``flag:startPara``, ``flag:startSentence``, ``pos:<TAG>``, ``punct:any`` or
``punct:sentence``.  Flag matchers test the current token without consuming
it.  Constraints are ``forbid_single_determiner``, ``min_tokens(n)`` and
``max_tokens(n)``; the ``constraints=`` field may be omitted.  Lines starting
with ``#`` are comments.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..errors import DuplicateRuleId, RuleSyntaxError
from .tagger import START_PARA, START_SENTENCE, Pos, TaggedToken

_FLAGS = (START_PARA, START_SENTENCE)
_PUNCT_CLASSES = ("any", "sentence")
_LINE_RE = re.compile(
    r"^(?P<id>\S+)\s+(?P<type>\S+)\s+trigger=<(?P<trigger>[^<>]*)>\s+stop=<(?P<stop>[^<>]*)>"
    r"(?:\s+constraints=<(?P<constraints>[^<>]*)>)?\s*$"
)
_CONSTRAINT_RE = re.compile(r"^(min_tokens|max_tokens)\((\d+)\)$")


class RuleType(str, enum.Enum):
    NAMEWS = "namews"
    PURPOSE = "purpose"
    DOMAIN = "domain"


@dataclass(frozen=True)
class Matcher:
    kind: str
    value: str

    @property
    def zero_width(self) -> bool:
        return self.kind == "flag"

    def matches(self, tok: TaggedToken) -> bool:
        if self.kind == "lemma":
            return tok.lemma == self.value
        if self.kind == "flag":
            return self.value in tok.flags
        if self.kind == "pos":
            return tok.pos.value == self.value
        # punct
        if tok.pos is not Pos.PUNCT:
            return False
        return self.value == "any" or tok.surface in ".!?"

    def __str__(self) -> str:
        return f"{self.kind}:{self.value}"


Sequence = tuple[Matcher, ...]


@dataclass(frozen=True)
class TagRule:
    id: str
    rule_type: RuleType
    trigger: tuple[Sequence, ...]
    stop: tuple[Sequence, ...]
    forbid_single_determiner: bool = False
    min_tokens: int | None = None
    max_tokens: int | None = None

    @property
    def constraints(self) -> tuple[str, ...]:
        out = []
        if self.forbid_single_determiner:
            out.append("forbid_single_determiner")
        if self.min_tokens is not None:
            out.append(f"min_tokens({self.min_tokens})")
        if self.max_tokens is not None:
            out.append(f"max_tokens({self.max_tokens})")
        return tuple(out)

    @property
    def stops_at_punctuation(self) -> bool:
        """End of text closes a span only for rules that also stop at punctuation."""
        return any(
            m.kind == "punct" or (m.kind == "pos" and m.value == Pos.PUNCT.value)
            for seq in self.stop
            for m in seq
        )

    def to_dsl(self) -> str:
        def alts(seqs: tuple[Sequence, ...]) -> str:
            return ",".join("+".join(str(m) for m in seq) for seq in seqs)

        return (
            f"{self.id} {self.rule_type.value} trigger=<{alts(self.trigger)}> "
            f"stop=<{alts(self.stop)}> constraints=<{','.join(self.constraints)}>"
        )


def _parse_matcher(text: str, lineno: int) -> Matcher:
    kind, sep, value = text.strip().partition(":")
    if not sep or not value:
        raise RuleSyntaxError(f"bad matcher {text!r}", lineno)
    if kind == "lemma":
        return Matcher(kind, value.lower())
    if kind == "flag" and value in _FLAGS:
        return Matcher(kind, value)
    if kind == "pos" and value in Pos.__members__:
        return Matcher(kind, value)
    if kind == "punct" and value in _PUNCT_CLASSES:
        return Matcher(kind, value)
    raise RuleSyntaxError(f"unknown matcher {text!r}", lineno)


def _parse_alternatives(text: str, lineno: int, what: str) -> tuple[Sequence, ...]:
    alts = []
    for alt in text.split(","):
        if not alt.strip():
            raise RuleSyntaxError(f"empty alternative in {what}", lineno)
        seq = tuple(_parse_matcher(m, lineno) for m in alt.split("+"))
        alts.append(seq)
    if not alts:
        raise RuleSyntaxError(f"{what} must not be empty", lineno)
    return tuple(alts)


def parse_rule(line: str, lineno: int = 0) -> TagRule:
    m = _LINE_RE.match(line.strip())
    if not m:
        raise RuleSyntaxError(f"cannot parse rule: {line.strip()!r}", lineno)
    try:
        rule_type = RuleType(m["type"])
    except ValueError:
        raise RuleSyntaxError(f"unknown rule type {m['type']!r}", lineno) from None
    trigger = _parse_alternatives(m["trigger"], lineno, "trigger")
    stop = _parse_alternatives(m["stop"], lineno, "stop")
    if any(all(x.zero_width for x in seq) for seq in stop):
        raise RuleSyntaxError("a stop alternative must consume at least one token", lineno)
    kwargs: dict = {}
    for c in filter(None, (c.strip() for c in (m["constraints"] or "").split(","))):
        if c == "forbid_single_determiner":
            kwargs["forbid_single_determiner"] = True
            continue
        cm = _CONSTRAINT_RE.match(c)
        if not cm:
            raise RuleSyntaxError(f"unknown constraint {c!r}", lineno)
        kwargs[cm[1]] = int(cm[2])
    return TagRule(m["id"], rule_type, trigger, stop, **kwargs)


def parse_rules(text: str) -> list[TagRule]:
    rules: list[TagRule] = []
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        rule = parse_rule(line, lineno)
        if rule.id in seen:
            raise DuplicateRuleId(f"line {lineno}: duplicate rule id {rule.id!r}")
        seen.add(rule.id)
        rules.append(rule)
    return rules


def load_rules(path: str | Path | None = None) -> list[TagRule]:
    """Load a rule file, or the bundled base rule set when ``path`` is None."""
    if path is None:
        text = (resources.files("wsrep") / "data" / "rbtt_rules.txt").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return parse_rules(text)
