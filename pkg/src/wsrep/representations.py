"""Term-vector representations of services and the baseline builder."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

from .records import ServiceRecord
from .text.pipeline import DEFAULT_PIPELINE, TextPipeline

if TYPE_CHECKING:
    from .store import Store


class Kind(str, enum.Enum):
    B = "B"
    RBTT = "RBTT"
    SR = "SR"


@dataclass(frozen=True)
class Representation:
    """A service's term vector under one representation kind.

    For ``B`` and ``RBTT`` the values are term counts; for ``SR`` they are the
    walk probabilities of the retained terms, with every computed probability
    kept in ``raw_scores``.
    """

    service_id: str
    kind: Kind
    terms: dict[str, float] = field(default_factory=dict)
    raw_scores: dict[str, float] | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        for term, value in self.terms.items():
            if not term or term != term.lower():
                raise ValueError(f"bad term {term!r}")
            if self.kind is Kind.SR and not value > 0:
                raise ValueError(f"SR probability for {term!r} must be positive")
            if self.kind is not Kind.SR and value < 1:
                raise ValueError(f"count for {term!r} must be >= 1")

    @property
    def support(self) -> frozenset[str]:
        return frozenset(self.terms)

    def to_dict(self) -> dict[str, Any]:
        obj: dict[str, Any] = {
            "service_id": self.service_id,
            "kind": self.kind.value,
            "terms": dict(sorted(self.terms.items())),
        }
        if self.raw_scores is not None:
            obj["raw_scores"] = dict(sorted(self.raw_scores.items()))
        return obj

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Representation":
        return cls(d["service_id"], Kind(d["kind"]), dict(d["terms"]), d.get("raw_scores"))


def baseline_texts(service: ServiceRecord) -> list[str]:
    """Text fields that feed the baseline representation, in a fixed order."""
    texts = [service.documentation]
    for op in service.operations:
        texts.append(op.documentation)
        texts.append(op.name)
    for t in service.declared_types:
        texts.append(t.name)
        texts.extend(t.member_names)
    return texts


def build_baseline(service: ServiceRecord, pipeline: TextPipeline = DEFAULT_PIPELINE) -> Representation:
    """Documentation, operation names/docs and declared type names, as stemmed counts."""
    counts: Counter[str] = Counter()
    for text in baseline_texts(service):
        counts.update(pipeline(text))
    return Representation(service.id, Kind.B, dict(sorted(counts.items())))


def get_vr(service_id: str, kind, store: "Store") -> frozenset[str]:
    """Distinct terms of the stored representation; raises ``NotFound``."""
    return store.get_representation(service_id, kind).support
