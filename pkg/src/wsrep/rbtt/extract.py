"""Rule application, annotation output and lexicon learning."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence
from xml.sax.saxutils import escape

from ..records import ServiceRecord
from ..representations import Kind, Representation, build_baseline
from ..text.pipeline import DEFAULT_PIPELINE, TextPipeline
from .rules import RuleType, TagRule
from .tagger import Pos, TaggedToken, remove_tags, tokenize_tag


@dataclass(frozen=True)
class Annotation:
    service_id: str
    rule_type: RuleType
    text: str
    start: int
    end: int
    rule_id: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "service_id": self.service_id,
            "rule_type": self.rule_type.value,
            "text": self.text,
            "start": self.start,
            "end": self.end,
            "rule_id": self.rule_id,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Annotation":
        return cls(d["service_id"], RuleType(d["rule_type"]), d["text"], d["start"], d["end"], d["rule_id"])


def _match_sequence(seq, tokens: Sequence[TaggedToken], i: int) -> int | None:
    """Index just past ``seq`` matched at ``i``, or None."""
    for m in seq:
        if i >= len(tokens) or not m.matches(tokens[i]):
            return None
        if not m.zero_width:
            i += 1
    return i


def _span_text(tokens: Sequence[TaggedToken], start: int, end: int) -> str:
    parts = [tokens[start].surface]
    for tok in tokens[start + 1 : end]:
        parts.append(" " + tok.surface if tok.ws_before else tok.surface)
    return "".join(parts)


def _accumulate(rule: TagRule, tokens: Sequence[TaggedToken], start: int) -> tuple[int, int] | None:
    n = len(tokens)
    for j in range(start, n + 1):
        if j == n:
            end = n if rule.stops_at_punctuation else None
        elif any(_match_sequence(seq, tokens, j) is not None for seq in rule.stop):
            end = j
        else:
            if rule.max_tokens is not None and j - start >= rule.max_tokens:
                return None
            continue
        if end is None or end == start:
            return None
        length = end - start
        if rule.min_tokens is not None and length < rule.min_tokens:
            return None
        if rule.max_tokens is not None and length > rule.max_tokens:
            return None
        # the grammar refuses a determiner right before the stop phrase
        if rule.forbid_single_determiner and tokens[end - 1].pos is Pos.DT:
            return None
        return start, end
    return None


def _overlaps(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] < b[1] and b[0] < a[1]


def apply_rules(
    tokens: Sequence[TaggedToken], rules: Iterable[TagRule], service_id: str = ""
) -> list[Annotation]:
    """Extract annotations left to right.

    A trigger match opens a span that grows until one of the rule's stop
    alternatives matches.  Overlaps go to the earlier rule; within a rule the
    longest span wins.  Results are ordered by position.
    """
    accepted: list[tuple[tuple[int, int], int, TagRule]] = []
    for order, rule in enumerate(rules):
        spans = set()
        for i in range(len(tokens)):
            for seq in rule.trigger:
                t_end = _match_sequence(seq, tokens, i)
                if t_end is None:
                    continue
                span = _accumulate(rule, tokens, t_end)
                if span is not None:
                    spans.add(span)
        mine: list[tuple[int, int]] = []
        for span in sorted(spans, key=lambda s: (s[0] - s[1], s[0])):
            if any(_overlaps(span, s) for s in mine) or any(_overlaps(span, s) for s, _, _ in accepted):
                continue
            mine.append(span)
        accepted.extend((s, order, rule) for s in mine)
    accepted.sort(key=lambda a: (a[0][0], a[1]))
    return [
        Annotation(service_id, rule.rule_type, _span_text(tokens, s, e), s, e, rule.id)
        for (s, e), _, rule in accepted
    ]


def description_text(service: ServiceRecord) -> str:
    """The free text rules are applied to: service then operation documentation."""
    docs = [service.documentation, *(op.documentation for op in service.operations)]
    return "\n\n".join(remove_tags(d).strip() for d in docs if d and d.strip())


def tag_service(service: ServiceRecord, rules: Sequence[TagRule]) -> list[Annotation]:
    return apply_rules(tokenize_tag(description_text(service)), rules, service.id)


def build_rbtt_representation(
    annotations: Sequence[Annotation],
    service: ServiceRecord,
    pipeline: TextPipeline = DEFAULT_PIPELINE,
) -> Representation:
    """Stemmed terms of the annotated spans; the baseline terms when nothing was tagged."""
    if not annotations:
        return Representation(service.id, Kind.RBTT, build_baseline(service, pipeline).terms)
    counts: Counter[str] = Counter()
    for ann in annotations:
        counts.update(pipeline(ann.text))
    return Representation(service.id, Kind.RBTT, dict(sorted(counts.items())))


def export_annotations_xml(annotations: Sequence[Annotation], service_id: str) -> str:
    body = "".join(
        f"<{a.rule_type.value}>{escape(a.text)}</{a.rule_type.value}>" for a in annotations
    )
    return f"<ws><id>{escape(service_id)}</id>{body}</ws>"


@dataclass
class Lexicon:
    """Multiword terms learnt from annotations, with their provenance.

    An entry's frequency is the number of distinct (service, rule, text)
    sources that produced it, so re-adding an annotation is a no-op.
    """

    entries: dict[tuple[str, str], set[tuple[str, str, str]]] = field(default_factory=dict)

    def frequency(self, text: str, rule_type: RuleType | str) -> int:
        return len(self.entries.get((RuleType(rule_type).value, text), ()))

    @property
    def terms(self) -> dict[tuple[str, str], int]:
        return {k: len(v) for k, v in sorted(self.entries.items())}

    def to_rows(self) -> list[dict[str, Any]]:
        return [
            {
                "id": f"{rtype}/{text}",
                "rule_type": rtype,
                "text": text,
                "frequency": len(sources),
                "sources": sorted(list(s) for s in sources),
            }
            for (rtype, text), sources in sorted(self.entries.items())
        ]

    @classmethod
    def from_rows(cls, rows: Iterable[dict[str, Any]]) -> "Lexicon":
        return cls({(r["rule_type"], r["text"]): {tuple(s) for s in r["sources"]} for r in rows})


def update_lexicon(annotations: Iterable[Annotation], lexicon: Lexicon) -> Lexicon:
    entries = {k: set(v) for k, v in lexicon.entries.items()}
    for a in annotations:
        if not a.text:
            continue
        entries.setdefault((a.rule_type.value, a.text), set()).add((a.service_id, a.rule_id, a.text))
    return Lexicon(entries)
