"""Functional matching, QoS matching, ranking and selection of services."""

from __future__ import annotations

import enum
import math
import random
from collections import Counter
from dataclasses import asdict, dataclass, field, replace
from typing import TYPE_CHECKING, Any, Iterable, Mapping, Sequence

from .errors import MissingRepresentation, QoSDirectionConflict
from .representations import Kind
from .store import Direction, QoSAdvertisement
from .text.pipeline import DEFAULT_PIPELINE, TextPipeline

if TYPE_CHECKING:
    from .representations import Representation
    from .reputation import NumericReputationConfig
    from .store import Store


class Mode(str, enum.Enum):
    FUNCTIONAL = "Functional"
    QOS = "Qos"
    QOS_AND_REP = "QosAndRep"


def _check_weight(w: float) -> None:
    if not (math.isfinite(w) and w >= 0):
        raise ValueError(f"weight must be finite and >= 0, got {w}")


@dataclass(frozen=True)
class QoSRequirement:
    attribute: str
    min: float | None = None
    max: float | None = None
    weight: float = 1.0

    def __post_init__(self):
        _check_weight(self.weight)
        if self.min is not None and self.max is not None and self.min > self.max:
            raise ValueError(f"{self.attribute}: min {self.min} exceeds max {self.max}")

    def admits(self, value: float) -> bool:
        return (self.min is None or value >= self.min) and (self.max is None or value <= self.max)


@dataclass(frozen=True)
class ReputationRequirement:
    min_score: float = 0.0
    weight: float = 1.0

    def __post_init__(self):
        _check_weight(self.weight)
        if not 0.0 <= self.min_score <= 1.0:
            raise ValueError(f"min_score must be in [0, 1], got {self.min_score}")


@dataclass(frozen=True)
class Query:
    functional_terms: str
    qos_requirements: tuple[QoSRequirement, ...] | None = None
    reputation_requirement: ReputationRequirement | None = None
    nb_max: int | None = None
    rep_kind: Kind = Kind.B
    match_threshold: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "rep_kind", Kind(self.rep_kind))
        if self.rep_kind is Kind.SR:
            raise ValueError("queries match against B or RBTT representations")
        if self.nb_max is not None and self.nb_max < 1:
            raise ValueError("nb_max must be a positive integer")
        if not 0.0 <= self.match_threshold <= 1.0:
            raise ValueError("match_threshold must be in [0, 1]")
        if self.qos_requirements is not None:
            object.__setattr__(self, "qos_requirements", tuple(self.qos_requirements))

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Query":
        qos = d.get("qos_requirements")
        rep = d.get("reputation_requirement")
        return cls(
            functional_terms=d.get("functional_terms", ""),
            qos_requirements=None if qos is None else tuple(QoSRequirement(**q) for q in qos),
            reputation_requirement=None if rep is None else ReputationRequirement(**rep),
            nb_max=d.get("nb_max"),
            rep_kind=Kind(d.get("rep_kind", "B")),
            match_threshold=d.get("match_threshold", 0.1),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "functional_terms": self.functional_terms,
            "qos_requirements": None
            if self.qos_requirements is None
            else [asdict(q) for q in self.qos_requirements],
            "reputation_requirement": None
            if self.reputation_requirement is None
            else asdict(self.reputation_requirement),
            "nb_max": self.nb_max,
            "rep_kind": self.rep_kind.value,
            "match_threshold": self.match_threshold,
        }


@dataclass(frozen=True)
class ScoredService:
    service_id: str
    functional_score: float
    qos_score: float | None = None
    reputation_score: float | None = None
    overall: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def rank_order(services: Iterable[ScoredService]) -> list[ScoredService]:
    """Best overall score first, ties by ascending id."""
    return sorted(services, key=lambda s: (-s.overall, s.service_id))


def cosine(a: Mapping[str, float], b: Mapping[str, float]) -> float:
    dot = math.fsum(v * b[t] for t, v in a.items() if t in b)
    if dot == 0.0:
        return 0.0
    na = math.sqrt(math.fsum(v * v for v in a.values()))
    nb = math.sqrt(math.fsum(v * v for v in b.values()))
    return min(1.0, dot / (na * nb))


def match_representations(
    query_terms: Mapping[str, float], reps: Iterable["Representation"], threshold: float
) -> list[ScoredService]:
    """Cosine-score representations against a query vector.

    A service needs a positive score, so a zero threshold still excludes
    services sharing no term with the query.
    """
    if not query_terms:
        return []
    out = []
    for rep in reps:
        score = cosine(query_terms, rep.terms)
        if score > 0.0 and score >= threshold:
            out.append(ScoredService(rep.service_id, score, overall=score))
    return rank_order(out)


def func_matching(
    query: Query, store: "Store", pipeline: TextPipeline = DEFAULT_PIPELINE
) -> list[ScoredService]:
    """Services whose representation is close enough to the query terms."""
    q = Counter(pipeline(query.functional_terms))
    if not q:
        return []
    reps = store.list_representations(query.rep_kind)
    if not reps:
        raise MissingRepresentation(f"no {query.rep_kind.value} representations in store")
    return match_representations(q, reps, query.match_threshold)


def _directions(adverts: Iterable[QoSAdvertisement]) -> dict[str, Direction]:
    seen: dict[str, Direction] = {}
    for a in adverts:
        if seen.setdefault(a.attribute, a.direction) is not a.direction:
            raise QoSDirectionConflict(f"attribute {a.attribute!r} is advertised with both directions")
    return seen


def _normalized(values: Mapping[str, float], direction: Direction) -> dict[str, float]:
    lo, hi = min(values.values()), max(values.values())
    if hi == lo:
        return {sid: 1.0 for sid in values}
    if direction is Direction.HIGHER_BETTER:
        return {sid: (v - lo) / (hi - lo) for sid, v in values.items()}
    return {sid: (hi - v) / (hi - lo) for sid, v in values.items()}


def qos_scores(
    adverts: Mapping[str, Mapping[str, QoSAdvertisement]],
    requirements: Sequence[QoSRequirement],
) -> dict[str, float]:
    """Weighted normalized QoS score of each service in ``adverts``.

    ``adverts`` maps service id to its advertisements by attribute; a service
    is scored only on attributes it advertises.  With all weights zero the
    attributes count equally.
    """
    directions = _directions(a for per in adverts.values() for a in per.values())
    norms: dict[str, dict[str, float]] = {}
    for req in requirements:
        values = {sid: per[req.attribute].value for sid, per in adverts.items() if req.attribute in per}
        if values:
            norms[req.attribute] = _normalized(values, directions[req.attribute])
    total_w = math.fsum(r.weight for r in requirements)
    out = {}
    for sid in adverts:
        parts = [(r.weight if total_w > 0 else 1.0, norms[r.attribute][sid])
                 for r in requirements if r.attribute in norms and sid in norms[r.attribute]]
        w = math.fsum(p[0] for p in parts)
        out[sid] = math.fsum(wi * v for wi, v in parts) / w if w > 0 else 1.0
    return out


def qos_matching(
    candidates: Sequence[ScoredService],
    qos_requirements: Sequence[QoSRequirement],
    store: "Store",
) -> list[ScoredService]:
    """Drop candidates violating a constraint and score the survivors.

    An attribute the candidate does not advertise counts as a violation.
    """
    survivors: dict[str, dict[str, QoSAdvertisement]] = {}
    for c in candidates:
        per = {a.attribute: a for a in store.list_qos(c.service_id)}
        ok = all(r.attribute in per and r.admits(per[r.attribute].value) for r in qos_requirements)
        if ok:
            survivors[c.service_id] = per
    if not survivors:
        return []
    scores = qos_scores(
        {sid: {r.attribute: per[r.attribute] for r in qos_requirements} for sid, per in survivors.items()},
        qos_requirements,
    )
    return [
        replace(c, qos_score=scores[c.service_id], overall=scores[c.service_id])
        for c in candidates
        if c.service_id in survivors
    ]


@dataclass(frozen=True)
class Ranked:
    services: list[ScoredService]
    # candidates dropped because a reputation was required but none is stored
    missing_reputation: list[str] = field(default_factory=list)


def ranking(
    candidates: Sequence[ScoredService],
    qos_requirements: Sequence[QoSRequirement] = (),
    reputation_requirement: ReputationRequirement | None = None,
    reputations: Mapping[str, float] | None = None,
    *,
    qos_weight: float | None = None,
) -> Ranked:
    """Combine QoS and reputation scores into ``overall`` and sort.

    ``qos_weight`` defaults to the sum of the requirement weights.  When both
    weights are zero the two scores are averaged.
    """
    if reputation_requirement is None:
        ranked = [replace(c, overall=c.qos_score if c.qos_score is not None else c.functional_score)
                  for c in candidates]
        return Ranked(rank_order(ranked))
    reputations = reputations or {}
    w_q = math.fsum(r.weight for r in qos_requirements) if qos_weight is None else qos_weight
    w_r = reputation_requirement.weight
    kept, missing = [], []
    for c in candidates:
        if c.service_id not in reputations:
            missing.append(c.service_id)
            continue
        rep = reputations[c.service_id]
        if rep < reputation_requirement.min_score:
            continue
        q = c.qos_score if c.qos_score is not None else 0.0
        overall = (w_q * q + w_r * rep) / (w_q + w_r) if w_q + w_r > 0 else (q + rep) / 2
        kept.append(replace(c, reputation_score=rep, overall=overall))
    return Ranked(rank_order(kept), sorted(missing))


def select(
    ranked: Sequence[ScoredService],
    nb_max: int | None,
    rng: random.Random | None = None,
    threshold: float = 0.5,
) -> list[ScoredService]:
    """The top ``nb_max`` services, or one random pick above ``threshold``."""
    if nb_max is not None:
        return list(ranked[:nb_max])
    pool = [s for s in ranked if s.overall >= threshold]
    if not pool:
        return []
    rng = rng if rng is not None else random.Random(0)
    return [rng.choice(pool)]


@dataclass(frozen=True)
class DiscoveryResult:
    mode: Mode
    services: list[ScoredService]
    missing_reputation: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "mode": self.mode.value,
            "services": [s.to_dict() for s in self.services],
            "missing_reputation": list(self.missing_reputation),
        }


def stored_reputations(
    store: "Store", service_ids: Iterable[str], cfg: "NumericReputationConfig | None" = None
) -> dict[str, float]:
    """Numeric reputation of each listed service that has ratings."""
    from .reputation import NumericReputationConfig, numeric_reputation

    cfg = cfg or NumericReputationConfig()
    out = {}
    for sid in service_ids:
        ratings = store.list_ratings(sid)
        if ratings:
            out[sid] = numeric_reputation(ratings, cfg)
    return out


def discover(
    query: Query,
    store: "Store",
    *,
    rng: random.Random | None = None,
    select_threshold: float = 0.5,
    reputation_cfg: "NumericReputationConfig | None" = None,
    pipeline: TextPipeline = DEFAULT_PIPELINE,
) -> DiscoveryResult:
    """Match, rank and select following the three discovery branches.

    Without QoS requirements the functional matches are selected directly and
    any reputation requirement is ignored.
    """
    f_match = func_matching(query, store, pipeline)
    qos_rq = query.qos_requirements or None
    if qos_rq is None:
        return DiscoveryResult(Mode.FUNCTIONAL, select(f_match, query.nb_max, rng, select_threshold))
    q_match = qos_matching(f_match, qos_rq, store) if f_match else []
    if query.reputation_requirement is None:
        ranked = ranking(q_match, qos_rq)
        return DiscoveryResult(Mode.QOS, select(ranked.services, query.nb_max, rng, select_threshold))
    reps = stored_reputations(store, (c.service_id for c in q_match), reputation_cfg)
    ranked = ranking(q_match, qos_rq, query.reputation_requirement, reps)
    return DiscoveryResult(
        Mode.QOS_AND_REP,
        select(ranked.services, query.nb_max, rng, select_threshold),
        ranked.missing_reputation,
    )
