"""Store-level pipelines that build and persist representations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

from .rbtt import TagRule, build_rbtt_representation, load_rules, tag_service, update_lexicon
from .representations import build_baseline
from .text.pipeline import DEFAULT_PIPELINE, TextPipeline

if TYPE_CHECKING:
    from .store import Store


def build_baselines(store: "Store", pipeline: TextPipeline = DEFAULT_PIPELINE) -> int:
    """(Re)build the B representation of every stored service."""
    services = store.list_services()
    with store.batch():
        for svc in services:
            store.put_representation(build_baseline(svc, pipeline))
    return len(services)


@dataclass(frozen=True)
class TagSummary:
    services: int
    tagged: int
    annotations: int
    lexicon_terms: int

    def to_dict(self) -> dict[str, int]:
        return {
            "services": self.services,
            "tagged": self.tagged,
            "annotations": self.annotations,
            "lexicon_terms": self.lexicon_terms,
        }


def tag_corpus(
    store: "Store",
    rules: Sequence[TagRule] | None = None,
    pipeline: TextPipeline = DEFAULT_PIPELINE,
) -> TagSummary:
    """Annotate every service, store RBTT representations and grow the lexicon."""
    rules = load_rules() if rules is None else rules
    lexicon = store.get_lexicon()
    tagged = total = 0
    services = store.list_services()
    with store.batch():
        for svc in services:
            anns = tag_service(svc, rules)
            store.delete_annotations(svc.id)
            for ann in anns:
                store.put_annotation(ann)
            store.put_representation(build_rbtt_representation(anns, svc, pipeline))
            lexicon = update_lexicon(anns, lexicon)
            tagged += bool(anns)
            total += len(anns)
        store.put_lexicon(lexicon)
    return TagSummary(len(services), tagged, total, len(lexicon.entries))
