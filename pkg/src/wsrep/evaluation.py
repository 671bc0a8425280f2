"""Precision/recall and the per-category discovery experiment."""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Iterable, Sequence

from .discovery import match_representations
from .errors import EmptyRelevantSet, EmptyRetrieval, MissingRepresentation, UnknownCategory
from .representations import Kind
from .text.pipeline import DEFAULT_PIPELINE, TextPipeline

if TYPE_CHECKING:
    from .store import Store

UNDEFINED = "—"


def precision(retrieved: Iterable[str], relevant: Iterable[str]) -> float:
    retrieved, relevant = set(retrieved), set(relevant)
    if not retrieved:
        raise EmptyRetrieval("precision is undefined for an empty retrieval")
    return len(retrieved & relevant) / len(retrieved)


def recall(retrieved: Iterable[str], relevant: Iterable[str]) -> float:
    retrieved, relevant = set(retrieved), set(relevant)
    if not relevant:
        raise EmptyRelevantSet("recall is undefined for an empty relevant set")
    return len(retrieved & relevant) / len(relevant)


@dataclass(frozen=True)
class Cell:
    category: str
    rep_kind: Kind
    retrieved: int
    relevant: int
    hits: int
    # None when nothing was retrieved
    precision: float | None
    recall: float

    @property
    def defined(self) -> bool:
        return self.precision is not None


def _pct(x: float | None) -> str:
    return UNDEFINED if x is None else f"{100 * x:.2f}"


def _mean(xs: Sequence[float]) -> float | None:
    return math.fsum(xs) / len(xs) if xs else None


@dataclass(frozen=True)
class ExperimentReport:
    categories: list[str]
    rep_kinds: list[Kind]
    cells: list[Cell]

    def cell(self, category: str, kind: Kind | str) -> Cell:
        kind = Kind(kind)
        return next(c for c in self.cells if c.category == category and c.rep_kind is kind)

    def averages(self, kind: Kind | str) -> tuple[float | None, float | None]:
        """Means over the cells of one kind; undefined precisions are skipped."""
        cells = [c for c in self.cells if c.rep_kind is Kind(kind)]
        return (
            _mean([c.precision for c in cells if c.precision is not None]),
            _mean([c.recall for c in cells]),
        )

    def undefined_count(self, kind: Kind | str) -> int:
        return sum(1 for c in self.cells if c.rep_kind is Kind(kind) and not c.defined)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["category", "rep_kind", "precision_pct", "recall_pct"])
        for c in self.cells:
            w.writerow([c.category, c.rep_kind.value, _pct(c.precision), _pct(c.recall)])
        for k in self.rep_kinds:
            p, r = self.averages(k)
            w.writerow(["Average", k.value, _pct(p), _pct(r)])
        return buf.getvalue()

    def to_markdown(self) -> str:
        head = ["Categories"]
        for k in self.rep_kinds:
            head += [f"{k.value} P%", f"{k.value} R%"]
        lines = ["| " + " | ".join(head) + " |", "|" + "---|" * len(head)]
        for cat in self.categories:
            row = [cat]
            for k in self.rep_kinds:
                c = self.cell(cat, k)
                row += [_pct(c.precision), _pct(c.recall)]
            lines.append("| " + " | ".join(row) + " |")
        avg = ["Average"]
        for k in self.rep_kinds:
            avg += [_pct(x) for x in self.averages(k)]
        lines.append("| " + " | ".join(avg) + " |")
        notes = [
            f"{k.value}: {n} undefined cell(s) excluded from the precision average"
            for k in self.rep_kinds
            if (n := self.undefined_count(k))
        ]
        if notes:
            lines.append("")
            lines += [f"{UNDEFINED} {note}" for note in notes]
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict[str, Any]:
        return {
            "cells": [
                {
                    "category": c.category,
                    "rep_kind": c.rep_kind.value,
                    "retrieved": c.retrieved,
                    "relevant": c.relevant,
                    "hits": c.hits,
                    "precision": c.precision,
                    "recall": c.recall,
                }
                for c in self.cells
            ],
            "averages": {
                k.value: dict(zip(("precision", "recall"), self.averages(k))) for k in self.rep_kinds
            },
        }


def run_category_experiment(
    store: "Store",
    categories: Sequence[str],
    rep_kinds: Sequence[Kind | str],
    query_template: str = "{category}",
    pipeline: TextPipeline = DEFAULT_PIPELINE,
) -> ExperimentReport:
    """Query each category by name and score the full match set against its labels."""
    services = store.list_services()
    labels = {s.id: s.category for s in services}
    kinds = [Kind(k) for k in rep_kinds]
    reps_by_kind = {}
    for k in kinds:
        reps = store.list_representations(k)
        if not reps:
            raise MissingRepresentation(f"no {k.value} representations in store")
        reps_by_kind[k] = reps
    cells = []
    for cat in categories:
        relevant = {sid for sid, c in labels.items() if c == cat}
        if not relevant:
            raise UnknownCategory(f"no service is labelled {cat!r}")
        q = Counter(pipeline(query_template.format(category=cat)))
        for k in kinds:
            hits_list = match_representations(q, reps_by_kind[k], 0.0)
            retrieved = {s.service_id for s in hits_list}
            p = precision(retrieved, relevant) if retrieved else None
            r = recall(retrieved, relevant)
            cells.append(
                Cell(cat, k, len(retrieved), len(relevant), len(retrieved & relevant), p, r)
            )
    return ExperimentReport(list(categories), kinds, cells)
