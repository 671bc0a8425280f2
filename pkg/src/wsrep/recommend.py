"""Recommendation of related services from a target's symbolic reputation."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

from .discovery import QoSRequirement, ReputationRequirement, ScoredService, qos_scores, ranking
from .errors import NoSymbolicReputation, NotFound
from .representations import Kind

if TYPE_CHECKING:
    from .reputation import NumericReputationConfig
    from .store import Store

# score given to a service with no QoS advertisement or no rating
MIDPOINT = 0.5


@dataclass(frozen=True)
class RecommendationConfig:
    overlap_threshold: int = 1
    max_results: int = 10

    def __post_init__(self):
        if self.overlap_threshold < 1:
            raise ValueError("overlap_threshold must be >= 1")
        if self.max_results < 1:
            raise ValueError("max_results must be >= 1")


@dataclass(frozen=True)
class Recommendation:
    target_id: str
    target_uri: str
    services: list[ScoredService]
    uris: dict[str, str]

    def to_dict(self) -> dict[str, Any]:
        return {
            "target": {"service_id": self.target_id, "uri": self.target_uri},
            "recommended": [{**s.to_dict(), "uri": self.uris[s.service_id]} for s in self.services],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False)

    def to_text(self) -> str:
        lines = ["Target service:", f"  {self.target_uri}", "Recommended web services:"]
        lines += [f"  {self.uris[s.service_id]}  {s.overall:.4f}" for s in self.services]
        if not self.services:
            lines.append("  (none)")
        return "\n".join(lines) + "\n"


def candidate_set(
    sr_terms: frozenset[str], vr: dict[str, frozenset[str]], target_id: str, threshold: int
) -> dict[str, int]:
    """Services other than the target sharing at least ``threshold`` SR terms, with the overlap."""
    out = {}
    for sid in sorted(vr):
        if sid == target_id:
            continue
        overlap = len(sr_terms & vr[sid])
        if overlap >= threshold:
            out[sid] = overlap
    return out


def recommend(
    target_id: str,
    store: "Store",
    cfg: RecommendationConfig = RecommendationConfig(),
    *,
    vr_kind: Kind | str = Kind.B,
    reputation_cfg: "NumericReputationConfig | None" = None,
) -> Recommendation:
    """Rank the services whose representation overlaps the target's SR terms.

    QoS scores are normalized over the candidate cohort with equal weights
    on the advertised attributes; reputation comes from stored ratings.
    Services lacking either get the midpoint score.
    """
    from .discovery import stored_reputations

    try:
        sr = store.get_representation(target_id, Kind.SR)
    except NotFound:
        raise NoSymbolicReputation(f"no symbolic reputation stored for {target_id}") from None
    vr = {rep.service_id: rep.support for rep in store.list_representations(Kind(vr_kind))}
    cands = candidate_set(sr.support, vr, target_id, cfg.overlap_threshold)

    adverts = {}
    for sid in cands:
        per = {a.attribute: a for a in store.list_qos(sid)}
        if per:
            adverts[sid] = per
    attributes = sorted({a for per in adverts.values() for a in per})
    reqs = [QoSRequirement(a) for a in attributes]
    q = qos_scores(adverts, reqs) if adverts else {}
    reps = stored_reputations(store, cands, reputation_cfg)

    n_sr = len(sr.support)
    scored = [
        ScoredService(sid, overlap / n_sr, qos_score=q.get(sid, MIDPOINT))
        for sid, overlap in cands.items()
    ]
    ranked = ranking(
        scored,
        reqs,
        ReputationRequirement(0.0, 1.0),
        {sid: reps.get(sid, MIDPOINT) for sid in cands},
        qos_weight=1.0,
    )
    top = ranked.services[: cfg.max_results]
    uris = {s.service_id: store.get_service(s.service_id).wsdl_uri for s in top}
    return Recommendation(target_id, store.get_service(target_id).wsdl_uri, top, uris)
