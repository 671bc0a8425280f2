"""Term similarity, operation dependency and the service dependency graph.

An edge ``a -> b`` means service ``a`` can feed service ``b``: some operation
of ``b`` has every input matched, by name similarity, by an output of some
operation of ``a``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Sequence

from .errors import EmptyCorpus
from .records import OperationRecord, ServiceRecord
from .store import TermStats
from .text.pipeline import DEFAULT_PIPELINE, TextPipeline

if TYPE_CHECKING:
    from .store import Store


class SimilarityMethod(str, enum.Enum):
    EXACT_STEM = "ExactStem"
    CORPUS_NGD = "CorpusNGD"


@dataclass(frozen=True)
class SimilarityConfig:
    method: SimilarityMethod = SimilarityMethod.EXACT_STEM
    alpha: float = 0.8

    def __post_init__(self):
        object.__setattr__(self, "method", SimilarityMethod(self.method))
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")


@dataclass(frozen=True)
class DependencyGraph:
    nodes: frozenset[str]
    edges: frozenset[tuple[str, str]]
    out_degree: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        for a, b in self.edges:
            if a not in self.nodes or b not in self.nodes:
                raise ValueError(f"edge {a}->{b} has an endpoint outside the node set")
            if a == b:
                raise ValueError(f"self-loop on {a}")
        degree = {n: 0 for n in self.nodes}
        for a, _ in self.edges:
            degree[a] += 1
        object.__setattr__(self, "out_degree", dict(sorted(degree.items())))

    @classmethod
    def from_edges(cls, nodes: Iterable[str], edges: Iterable[tuple[str, str]]) -> "DependencyGraph":
        edges = frozenset((a, b) for a, b in edges)
        all_nodes = set(nodes)
        for a, b in edges:
            all_nodes.update((a, b))
        return cls(frozenset(all_nodes), edges)

    def predecessors(self, node: str) -> list[str]:
        """Providers feeding ``node``, sorted by id."""
        return sorted(a for a, b in self.edges if b == node)

    def successors(self, node: str) -> list[str]:
        return sorted(b for a, b in self.edges if a == node)

    def to_dict(self) -> dict:
        return {
            "nodes": sorted(self.nodes),
            "edges": [{"from": a, "to": b} for a, b in sorted(self.edges)],
            "out_degree": self.out_degree,
        }


def ngd(x: str, y: str, stats: TermStats) -> float:
    """Normalized distance between two terms from corpus document frequencies.

    Degenerate inputs (a corpus of fewer than two services, an unseen term,
    or terms that never co-occur) are infinitely far apart.
    """
    if x == y:
        return 0.0
    fx, fy, fxy, m = stats.n(x), stats.n(y), stats.cooccurrence(x, y), stats.M
    if m < 2 or fx == 0 or fy == 0 or fxy == 0:
        return math.inf
    lx, ly = math.log(fx), math.log(fy)
    num = max(lx, ly) - math.log(fxy)
    den = math.log(m) - min(lx, ly)
    if den == 0.0:
        # both terms occur in every service, so they always co-occur
        return 0.0
    return num / den


def token_similarity(x: str, y: str, cfg: SimilarityConfig, stats: TermStats | None) -> float:
    if x == y:
        return 1.0
    if cfg.method is SimilarityMethod.EXACT_STEM or stats is None:
        return 0.0
    return min(1.0, max(0.0, 1.0 - ngd(x, y, stats)))


def _directed(xs: Sequence[str], ys: Sequence[str], cfg: SimilarityConfig, stats) -> float:
    return sum(max(token_similarity(x, y, cfg, stats) for y in ys) for x in xs) / len(xs)


def similarity(
    a: str,
    b: str,
    cfg: SimilarityConfig = SimilarityConfig(),
    stats: TermStats | None = None,
    pipeline: TextPipeline = DEFAULT_PIPELINE,
) -> float:
    """Symmetrized mean best-match similarity of two parameter names."""
    ta, tb = pipeline(a), pipeline(b)
    if not ta or not tb:
        return 0.0
    return (_directed(ta, tb, cfg, stats) + _directed(tb, ta, cfg, stats)) / 2


class _Matcher:
    """Memoizes name similarity, the hot spot of graph construction."""

    def __init__(self, cfg: SimilarityConfig, stats: TermStats | None, pipeline: TextPipeline):
        self.cfg, self.stats, self.pipeline = cfg, stats, pipeline
        self._cache: dict[tuple[str, str], float] = {}

    def sim(self, a: str, b: str) -> float:
        key = (a, b) if a <= b else (b, a)
        if key not in self._cache:
            self._cache[key] = similarity(a, b, self.cfg, self.stats, self.pipeline)
        return self._cache[key]

    def depends(self, f_i: OperationRecord, f_j: OperationRecord) -> bool:
        if not f_j.inputs:
            return False
        return all(
            any(self.sim(p.name, q.name) >= self.cfg.alpha for q in f_i.outputs) for p in f_j.inputs
        )


def operation_depends(
    f_i: OperationRecord,
    f_j: OperationRecord,
    cfg: SimilarityConfig = SimilarityConfig(),
    stats: TermStats | None = None,
    pipeline: TextPipeline = DEFAULT_PIPELINE,
) -> bool:
    """Whether ``f_i``'s outputs cover every input of ``f_j``.

    Operations without inputs depend on nothing.
    """
    return _Matcher(cfg, stats, pipeline).depends(f_i, f_j)


def dependency_graph(
    services: Sequence[ServiceRecord],
    cfg: SimilarityConfig = SimilarityConfig(),
    stats: TermStats | None = None,
    pipeline: TextPipeline = DEFAULT_PIPELINE,
) -> DependencyGraph:
    """Build the graph over an explicit list of services."""
    matcher = _Matcher(cfg, stats, pipeline)
    edges = set()
    for si in services:
        for sj in services:
            if si.id == sj.id:
                continue
            if any(matcher.depends(fi, fj) for fi in si.operations for fj in sj.operations):
                edges.add((si.id, sj.id))
    return DependencyGraph(frozenset(s.id for s in services), frozenset(edges))


def build_dependency_graph(
    store: "Store",
    cfg: SimilarityConfig = SimilarityConfig(),
    stats: TermStats | None = None,
    pipeline: TextPipeline = DEFAULT_PIPELINE,
) -> DependencyGraph:
    """Build the graph over every stored service.

    Corpus similarity needs term statistics; when none are given they are
    computed from the stored baseline representations.
    """
    services = store.list_services()
    if not services:
        raise EmptyCorpus("no services in store")
    if cfg.method is SimilarityMethod.CORPUS_NGD and stats is None:
        from .representations import Kind
        from .store import term_stats

        stats = term_stats(store, Kind.B)
    return dependency_graph(services, cfg, stats, pipeline)
