"""Web-service representations, discovery and recommendation from WSDL corpora."""

from __future__ import annotations

from .depgraph import (
    DependencyGraph,
    SimilarityConfig,
    SimilarityMethod,
    build_dependency_graph,
    ngd,
    operation_depends,
    similarity,
)
from .discovery import Query, QoSRequirement, ReputationRequirement, ScoredService, discover
from .evaluation import precision, recall, run_category_experiment
from .ingest import check_availability, ingest_corpus, load_manifest, parse_wsdl
from .recommend import RecommendationConfig, recommend
from .records import ServiceRecord
from .representations import Kind, Representation, build_baseline, get_vr
from .reputation import (
    NumericReputationConfig,
    WalkConfig,
    enumerate_paths,
    numeric_reputation,
    symbolic_reputation,
)
from .store import QoSAdvertisement, RatingRecord, Store, TermStats, term_stats
from .text import detect_language, pipeline

__all__ = [
    "DependencyGraph",
    "Kind",
    "NumericReputationConfig",
    "QoSAdvertisement",
    "QoSRequirement",
    "Query",
    "RatingRecord",
    "RecommendationConfig",
    "Representation",
    "ReputationRequirement",
    "ScoredService",
    "ServiceRecord",
    "SimilarityConfig",
    "SimilarityMethod",
    "Store",
    "TermStats",
    "WalkConfig",
    "build_baseline",
    "build_dependency_graph",
    "check_availability",
    "detect_language",
    "discover",
    "enumerate_paths",
    "get_vr",
    "ingest_corpus",
    "load_manifest",
    "ngd",
    "numeric_reputation",
    "operation_depends",
    "parse_wsdl",
    "pipeline",
    "precision",
    "recall",
    "recommend",
    "run_category_experiment",
    "similarity",
    "symbolic_reputation",
    "term_stats",
]
