"""Directory-of-JSON-lines persistence for services and everything derived from them.

Layout: ``<root>/{services,representations,ratings,qos,annotations,graph,lexicon}.jsonl``.
Every line is one JSON object carrying an ``id``; files are rewritten whole,
sorted by id, so identical contents always produce identical bytes.
"""

from __future__ import annotations

import contextlib
import enum
import fcntl
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any, Iterator

from .errors import EmptyCorpus, NotFound, ReferentialIntegrity, StoreLocked
from .records import ServiceRecord

if TYPE_CHECKING:
    from .depgraph import DependencyGraph
    from .rbtt import Annotation, Lexicon
    from .representations import Representation

COLLECTIONS = ("services", "representations", "ratings", "qos", "annotations", "graph", "lexicon")
_DEPENDENT = ("representations", "ratings", "qos", "annotations")


class Direction(str, enum.Enum):
    HIGHER_BETTER = "HigherBetter"
    LOWER_BETTER = "LowerBetter"


@dataclass(frozen=True)
class RatingRecord:
    service_id: str
    score: float
    age_days: float = 0.0
    id: str | None = None

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"rating score {self.score} outside [0, 1]")
        if not self.age_days >= 0.0:
            raise ValueError(f"rating age {self.age_days} is negative")


@dataclass(frozen=True)
class QoSAdvertisement:
    service_id: str
    attribute: str
    value: float
    direction: Direction = Direction.HIGHER_BETTER

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction(self.direction))
        if not math.isfinite(self.value):
            raise ValueError(f"QoS value for {self.attribute!r} must be finite")


@dataclass(frozen=True)
class TermStats:
    """Document frequencies over one representation kind.

    ``postings`` keeps the service ids behind each count so co-occurrence
    counts can be answered exactly.
    """

    M: int
    postings: dict[str, frozenset[str]] = field(default_factory=dict)

    @property
    def df(self) -> dict[str, int]:
        return {t: len(ids) for t, ids in self.postings.items()}

    def n(self, term: str) -> int:
        return len(self.postings.get(term, ()))

    def cooccurrence(self, x: str, y: str) -> int:
        return len(self.postings.get(x, frozenset()) & self.postings.get(y, frozenset()))


def _dump(obj: dict[str, Any]) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


class Store:
    """JSON-lines store with an in-memory index.

    Open with ``writable=True`` to mutate; a writer holds an exclusive
    ``flock`` on ``<root>/.lock`` until :meth:`close`, readers take a shared
    lock only while loading.
    """

    def __init__(self, root: str | Path, *, writable: bool = False):
        self.root = Path(root)
        self.writable = writable
        self._data: dict[str, dict[str, dict[str, Any]]] = {c: {} for c in COLLECTIONS}
        self._dirty: set[str] = set()
        self._batch_depth = 0
        self._lock_fd: int | None = None
        if writable:
            self.root.mkdir(parents=True, exist_ok=True)
        elif not self.root.is_dir():
            raise NotFound(f"no store at {self.root}")
        self._lock(exclusive=writable)
        try:
            self._load()
        finally:
            if not writable:
                self._unlock()

    # locking / lifecycle

    def _lock(self, exclusive: bool) -> None:
        path = self.root / ".lock"
        if not exclusive and not path.exists():
            return
        fd = os.open(path, os.O_RDWR | os.O_CREAT, 0o644)
        try:
            fcntl.flock(fd, (fcntl.LOCK_EX if exclusive else fcntl.LOCK_SH) | fcntl.LOCK_NB)
        except BlockingIOError:
            os.close(fd)
            raise StoreLocked(f"store {self.root} is locked by another writer") from None
        self._lock_fd = fd

    def _unlock(self) -> None:
        if self._lock_fd is not None:
            fcntl.flock(self._lock_fd, fcntl.LOCK_UN)
            os.close(self._lock_fd)
            self._lock_fd = None

    def close(self) -> None:
        if self.writable:
            self.flush()
        self._unlock()

    def __enter__(self) -> "Store":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _load(self) -> None:
        for name in COLLECTIONS:
            path = self.root / f"{name}.jsonl"
            if not path.exists():
                continue
            for line in path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    obj = json.loads(line)
                    self._data[name][obj["id"]] = obj

    def flush(self) -> None:
        for name in sorted(self._dirty):
            rows = self._data[name]
            body = "".join(_dump(rows[k]) + "\n" for k in sorted(rows))
            fd, tmp = tempfile.mkstemp(dir=self.root, prefix=f".{name}.")
            with os.fdopen(fd, "w", encoding="utf-8") as f:
                f.write(body)
            os.replace(tmp, self.root / f"{name}.jsonl")
        self._dirty.clear()

    @contextlib.contextmanager
    def batch(self) -> Iterator["Store"]:
        """Defer file rewrites until the outermost batch exits."""
        self._batch_depth += 1
        try:
            yield self
        finally:
            self._batch_depth -= 1
            if self._batch_depth == 0 and self.writable:
                self.flush()

    # generic row access

    def _put(self, collection: str, obj: dict[str, Any]) -> None:
        if not self.writable:
            raise PermissionError("store opened read-only")
        self._data[collection][obj["id"]] = obj
        self._touch(collection)

    def _touch(self, collection: str) -> None:
        self._dirty.add(collection)
        if self._batch_depth == 0:
            self.flush()

    def _get(self, collection: str, key: str) -> dict[str, Any]:
        try:
            return self._data[collection][key]
        except KeyError:
            raise NotFound(f"{collection}: no entry {key!r}") from None

    def _delete(self, collection: str, key: str) -> None:
        if not self.writable:
            raise PermissionError("store opened read-only")
        if key not in self._data[collection]:
            raise NotFound(f"{collection}: no entry {key!r}")
        del self._data[collection][key]
        self._touch(collection)

    def _rows(self, collection: str, service_id: str | None = None) -> list[dict[str, Any]]:
        rows = self._data[collection]
        return [
            rows[k]
            for k in sorted(rows)
            if service_id is None or rows[k].get("service_id") == service_id
        ]

    def _require_service(self, service_id: str) -> None:
        if service_id not in self._data["services"]:
            raise ReferentialIntegrity(f"unknown service id {service_id!r}")

    # services

    def put_service(self, service: ServiceRecord) -> None:
        self._put("services", service.to_dict())

    def get_service(self, service_id: str) -> ServiceRecord:
        return ServiceRecord.from_dict(self._get("services", service_id))

    def has_service(self, service_id: str) -> bool:
        return service_id in self._data["services"]

    def list_services(self) -> list[ServiceRecord]:
        return [ServiceRecord.from_dict(r) for r in self._rows("services")]

    def delete_service(self, service_id: str) -> None:
        """Delete a service and everything that references it."""
        with self.batch():
            self._delete("services", service_id)
            for name in _DEPENDENT:
                for row in self._rows(name, service_id):
                    self._delete(name, row["id"])
            graph = self._data["graph"]
            doomed = [
                k
                for k, row in graph.items()
                if service_id in (row.get("node"), row.get("from"), row.get("to"))
            ]
            for k in doomed:
                self._delete("graph", k)

    # representations

    def put_representation(self, rep: "Representation") -> None:
        self._require_service(rep.service_id)
        obj = rep.to_dict()
        obj["id"] = f"{rep.service_id}/{rep.kind.value}"
        self._put("representations", obj)

    def get_representation(self, service_id: str, kind) -> "Representation":
        from .representations import Kind, Representation

        kind = Kind(kind)
        return Representation.from_dict(self._get("representations", f"{service_id}/{kind.value}"))

    def delete_representation(self, service_id: str, kind) -> None:
        from .representations import Kind

        self._delete("representations", f"{service_id}/{Kind(kind).value}")

    def list_representations(self, kind=None) -> list["Representation"]:
        from .representations import Kind, Representation

        want = None if kind is None else Kind(kind).value
        return [
            Representation.from_dict(r)
            for r in self._rows("representations")
            if want is None or r["kind"] == want
        ]

    # ratings

    def put_rating(self, rating: RatingRecord) -> RatingRecord:
        self._require_service(rating.service_id)
        rid = rating.id
        if rid is None:
            prefix = f"{rating.service_id}/r"
            taken = [int(k[len(prefix):]) for k in self._data["ratings"] if k.startswith(prefix)]
            rid = f"{prefix}{max(taken, default=0) + 1:06d}"
        self._put(
            "ratings",
            {"id": rid, "service_id": rating.service_id, "score": rating.score, "age_days": rating.age_days},
        )
        return RatingRecord(rating.service_id, rating.score, rating.age_days, rid)

    def get_rating(self, rating_id: str) -> RatingRecord:
        r = self._get("ratings", rating_id)
        return RatingRecord(r["service_id"], r["score"], r["age_days"], r["id"])

    def delete_rating(self, rating_id: str) -> None:
        self._delete("ratings", rating_id)

    def list_ratings(self, service_id: str | None = None) -> list[RatingRecord]:
        return [
            RatingRecord(r["service_id"], r["score"], r["age_days"], r["id"])
            for r in self._rows("ratings", service_id)
        ]

    # QoS advertisements

    def put_qos(self, adv: QoSAdvertisement) -> None:
        self._require_service(adv.service_id)
        self._put(
            "qos",
            {
                "id": f"{adv.service_id}/{adv.attribute}",
                "service_id": adv.service_id,
                "attribute": adv.attribute,
                "value": adv.value,
                "direction": adv.direction.value,
            },
        )

    def get_qos(self, service_id: str, attribute: str) -> QoSAdvertisement:
        return self._qos(self._get("qos", f"{service_id}/{attribute}"))

    def delete_qos(self, service_id: str, attribute: str) -> None:
        self._delete("qos", f"{service_id}/{attribute}")

    def list_qos(self, service_id: str | None = None) -> list[QoSAdvertisement]:
        return [self._qos(r) for r in self._rows("qos", service_id)]

    @staticmethod
    def _qos(r: dict[str, Any]) -> QoSAdvertisement:
        return QoSAdvertisement(r["service_id"], r["attribute"], r["value"], Direction(r["direction"]))

    # annotations

    def put_annotation(self, ann: "Annotation") -> None:
        self._require_service(ann.service_id)
        obj = ann.to_dict()
        obj["id"] = f"{ann.service_id}/{ann.start:06d}/{ann.rule_id}"
        self._put("annotations", obj)

    def list_annotations(self, service_id: str | None = None) -> list["Annotation"]:
        from .rbtt import Annotation

        return [Annotation.from_dict(r) for r in self._rows("annotations", service_id)]

    def delete_annotations(self, service_id: str) -> None:
        with self.batch():
            for row in self._rows("annotations", service_id):
                self._delete("annotations", row["id"])

    # dependency graph

    def put_graph(self, graph: "DependencyGraph") -> None:
        with self.batch():
            for key in list(self._data["graph"]):
                self._delete("graph", key)
            for node in sorted(graph.nodes):
                self._require_service(node)
                self._put("graph", {"id": f"node:{node}", "node": node})
            for a, b in sorted(graph.edges):
                self._put("graph", {"id": f"edge:{a}>{b}", "from": a, "to": b})

    def get_graph(self) -> "DependencyGraph":
        from .depgraph import DependencyGraph

        rows = self._rows("graph")
        if not rows:
            raise NotFound("no dependency graph stored")
        nodes = [r["node"] for r in rows if "node" in r]
        edges = [(r["from"], r["to"]) for r in rows if "from" in r]
        return DependencyGraph.from_edges(nodes, edges)

    # lexicon

    def put_lexicon(self, lexicon: "Lexicon") -> None:
        with self.batch():
            for key in list(self._data["lexicon"]):
                self._delete("lexicon", key)
            for obj in lexicon.to_rows():
                self._put("lexicon", obj)

    def get_lexicon(self) -> "Lexicon":
        from .rbtt import Lexicon

        return Lexicon.from_rows(self._rows("lexicon"))


def term_stats(store: Store, kind) -> TermStats:
    """Count, per term, the services whose ``kind`` representation contains it."""
    reps = store.list_representations(kind)
    if not reps:
        raise EmptyCorpus(f"no {kind} representations in store")
    postings: dict[str, set[str]] = {}
    for rep in reps:
        for term in rep.terms:
            postings.setdefault(term, set()).add(rep.service_id)
    return TermStats(len(reps), {t: frozenset(ids) for t, ids in sorted(postings.items())})
