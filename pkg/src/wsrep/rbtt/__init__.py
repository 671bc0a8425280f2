"""Rules-based tagging of service descriptions."""

from __future__ import annotations

from .extract import (
    Annotation,
    Lexicon,
    apply_rules,
    build_rbtt_representation,
    description_text,
    export_annotations_xml,
    tag_service,
    update_lexicon,
)
from .rules import Matcher, RuleType, TagRule, load_rules, parse_rule, parse_rules
from .tagger import Pos, TaggedToken, remove_tags, tokenize_tag

__all__ = [
    "Annotation",
    "Lexicon",
    "Matcher",
    "Pos",
    "RuleType",
    "TagRule",
    "TaggedToken",
    "apply_rules",
    "build_rbtt_representation",
    "description_text",
    "export_annotations_xml",
    "load_rules",
    "parse_rule",
    "parse_rules",
    "remove_tags",
    "tag_service",
    "tokenize_tag",
    "update_lexicon",
]
