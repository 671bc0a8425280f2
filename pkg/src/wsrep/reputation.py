"""Numeric reputation from ratings and symbolic reputation from a random walk."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Iterator, Mapping, Sequence

from .errors import BudgetExceeded, DegenerateWeights, InconsistentStats, NoRatings, NotInGraph
from .store import RatingRecord, TermStats

if TYPE_CHECKING:
    from .depgraph import DependencyGraph
    from .representations import Representation
    from .store import Store


@dataclass(frozen=True)
class NumericReputationConfig:
    # inclusion factor: a rating d days old weighs lam**d
    lam: float = 0.9

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lambda must be in [0, 1], got {self.lam}")


def numeric_reputation(
    ratings: Sequence[RatingRecord], cfg: NumericReputationConfig = NumericReputationConfig()
) -> float:
    """Recency-weighted mean of the rating scores."""
    if not ratings:
        raise NoRatings("no ratings to aggregate")
    weights = [cfg.lam ** r.age_days for r in ratings]
    total = math.fsum(weights)
    if total == 0.0:
        raise DegenerateWeights("every rating has weight zero")
    value = math.fsum(w * r.score for w, r in zip(weights, ratings)) / total
    scores = [r.score for r in ratings]
    return min(max(value, min(scores)), max(scores))


@dataclass(frozen=True)
class WalkConfig:
    d: float = 0.15
    k: int = 5
    # only path enumeration can blow up; the scorer itself never enumerates
    budget: int = 10**7

    def __post_init__(self):
        if not 0.0 < self.d < 1.0:
            raise ValueError(f"d must be in (0, 1), got {self.d}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.budget < 1:
            raise ValueError("budget must be positive")


@dataclass(frozen=True)
class SymbolicReputation:
    service_id: str
    scores: dict[str, float]
    terms: frozenset[str]

    def to_representation(self) -> "Representation":
        from .representations import Kind, Representation

        return Representation(
            self.service_id,
            Kind.SR,
            {t: self.scores[t] for t in sorted(self.terms)},
            dict(sorted(self.scores.items())),
        )


def enumerate_paths(
    graph: "DependencyGraph", target: str, max_len: int, budget: int = 10**7
) -> Iterator[tuple[tuple[str, ...], int]]:
    """Every walk of 1..max_len edges ending at ``target``.

    Walks may revisit nodes.  They come out by length, then in lexicographic
    order of their node sequences.
    """
    if target not in graph.nodes:
        raise NotInGraph(f"{target} is not in the dependency graph")
    preds = {n: graph.predecessors(n) for n in graph.nodes}
    frontier: list[tuple[str, ...]] = [(target,)]
    emitted = 0
    for length in range(1, max_len + 1):
        frontier = sorted((p, *path) for path in frontier for p in preds[path[0]])
        for path in frontier:
            emitted += 1
            if emitted > budget:
                raise BudgetExceeded(f"more than {budget} paths ending at {target}")
            yield path, length
        if not frontier:
            return


def _n_t(stats: TermStats, term: str) -> int:
    n = stats.n(term)
    if n == 0:
        raise InconsistentStats(f"term {term!r} is in a representation but not in the statistics")
    return n


def symbolic_reputation(
    service_id: str,
    graph: "DependencyGraph",
    vr: Mapping[str, Iterable[str]],
    stats: TermStats,
    cfg: WalkConfig = WalkConfig(),
) -> SymbolicReputation:
    """Walk probabilities P(s, t) and the terms that beat the uniform 1/N_t.

    Instead of listing paths, ``weight[q]`` holds, for the current length l,
    the sum over all walks q -> ... -> s of the product of 1/O(node) along the
    walk.  Each term of VR(q) then receives ``(1-d)^l * weight[q] * d'/N_t``,
    which is exactly the per-path accumulation summed in closed form.
    Services missing from ``vr`` have an empty representation.
    """
    if service_id not in graph.nodes:
        raise NotInGraph(f"{service_id} is not in the dependency graph")
    d, k = cfg.d, cfg.k
    preds = {n: graph.predecessors(n) for n in graph.nodes}
    scores: dict[str, float] = {}
    for t in sorted(set(vr.get(service_id, ()))):
        scores[t] = d / _n_t(stats, t)

    # length-1 walks: q -> s
    weight = {q: 1.0 / graph.out_degree[q] for q in preds[service_id]}
    for length in range(1, k + 1):
        if not weight:
            break
        d_prime = d if length < k else 1.0
        factor = (1.0 - d) ** length * d_prime
        mass: dict[str, float] = {}
        for q in sorted(weight):
            for t in set(vr.get(q, ())):
                mass[t] = mass.get(t, 0.0) + weight[q]
        for t in sorted(mass):
            scores[t] = scores.get(t, 0.0) + factor * mass[t] / _n_t(stats, t)
        nxt: dict[str, float] = {}
        for r in sorted(weight):
            for q in preds[r]:
                nxt[q] = nxt.get(q, 0.0) + weight[r] / graph.out_degree[q]
        weight = nxt

    terms = frozenset(t for t, p in scores.items() if _beats_uniform(p, stats.n(t)))
    return SymbolicReputation(service_id, dict(sorted(scores.items())), terms)


def _beats_uniform(p: float, n_t: int) -> bool:
    threshold = 1.0 / n_t
    # P equal to 1/N_t up to rounding is not strictly greater
    return p > threshold and not math.isclose(p, threshold, rel_tol=1e-12, abs_tol=0.0)


def stored_numeric_reputation(
    store: "Store", service_id: str, cfg: NumericReputationConfig = NumericReputationConfig()
) -> float:
    return numeric_reputation(store.list_ratings(service_id), cfg)


def compute_symbolic_reputations(
    store: "Store",
    cfg: WalkConfig = WalkConfig(),
    vr_kind="B",
    service_ids: Sequence[str] | None = None,
) -> list[SymbolicReputation]:
    """Score services against the stored graph and persist their SR representations."""
    from .representations import Kind
    from .store import term_stats

    kind = Kind(vr_kind)
    graph = store.get_graph()
    stats = term_stats(store, kind)
    vr = {rep.service_id: rep.support for rep in store.list_representations(kind)}
    ids = sorted(graph.nodes) if service_ids is None else list(service_ids)
    results = [symbolic_reputation(sid, graph, vr, stats, cfg) for sid in ids]
    with store.batch():
        for sr in results:
            store.put_representation(sr.to_representation())
    return results
