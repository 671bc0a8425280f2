from __future__ import annotations

from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import op, service
from wsrep.depgraph import DependencyGraph
from wsrep.errors import EmptyCorpus, NotFound, ReferentialIntegrity, StoreLocked
from wsrep.representations import Kind, Representation
from wsrep.store import Direction, QoSAdvertisement, RatingRecord, Store, term_stats


def _populate(store: Store) -> None:
    with store.batch():
        for sid in ("a", "b", "c"):
            store.put_service(service(sid, [op(f"Get{sid.upper()}", ["x"], ["y"])], f"service {sid}"))
        store.put_representation(Representation("a", Kind.B, {"weather": 2, "citi": 1}))
        store.put_representation(Representation("b", Kind.B, {"weather": 1}))
        store.put_representation(Representation("c", Kind.B, {"currenc": 1, "citi": 3}))
        store.put_rating(RatingRecord("a", 0.8, 1.0))
        store.put_rating(RatingRecord("a", 0.4, 0.0))
        store.put_qos(QoSAdvertisement("a", "latency", 120.0, Direction.LOWER_BETTER))
        store.put_graph(DependencyGraph.from_edges(["a", "b", "c"], [("a", "b"), ("b", "c")]))


class TestCrud:
    def test_service_round_trip(self, store):
        svc = service("s1", [op("Op", ["in"], ["out"], "does things")], "doc", "Weather")
        store.put_service(svc)
        assert store.get_service("s1") == svc
        assert store.has_service("s1") and not store.has_service("s2")
        assert store.list_services() == [svc]

    def test_not_found(self, store):
        with pytest.raises(NotFound):
            store.get_service("nope")
        with pytest.raises(NotFound):
            store.get_representation("nope", Kind.B)
        with pytest.raises(NotFound):
            store.get_graph()
        with pytest.raises(NotFound):
            store.delete_rating("nope")

    def test_not_found_is_key_error(self, store):
        with pytest.raises(KeyError):
            store.get_service("nope")

    def test_referential_integrity(self, store):
        with pytest.raises(ReferentialIntegrity):
            store.put_representation(Representation("ghost", Kind.B, {"x": 1}))
        with pytest.raises(ReferentialIntegrity):
            store.put_rating(RatingRecord("ghost", 0.5))
        with pytest.raises(ReferentialIntegrity):
            store.put_qos(QoSAdvertisement("ghost", "latency", 1.0))

    def test_rating_ids(self, store):
        _populate(store)
        assert [r.id for r in store.list_ratings("a")] == ["a/r000001", "a/r000002"]
        r = store.put_rating(RatingRecord("a", 1.0))
        assert r.id == "a/r000003"
        assert store.get_rating("a/r000003").score == 1.0

    def test_qos_direction_round_trip(self, store):
        _populate(store)
        adv = store.get_qos("a", "latency")
        assert adv.direction is Direction.LOWER_BETTER
        assert QoSAdvertisement("a", "x", 1.0, "LowerBetter").direction is Direction.LOWER_BETTER

    def test_validation(self):
        with pytest.raises(ValueError):
            RatingRecord("a", 1.5)
        with pytest.raises(ValueError):
            RatingRecord("a", 0.5, -1.0)
        with pytest.raises(ValueError):
            QoSAdvertisement("a", "x", float("nan"))

    def test_graph_round_trip(self, store):
        _populate(store)
        g = store.get_graph()
        assert g.nodes == frozenset("abc")
        assert g.edges == frozenset({("a", "b"), ("b", "c")})

    def test_read_only(self, store, tmp_path):
        _populate(store)
        store.close()
        ro = Store(tmp_path / "db")
        with pytest.raises(PermissionError):
            ro.put_service(service("z"))

    def test_missing_store_dir(self, tmp_path):
        with pytest.raises(NotFound):
            Store(tmp_path / "nothing")


class TestCascade:
    def test_delete_service_cascades(self, store):
        _populate(store)
        store.delete_service("a")
        assert not store.has_service("a")
        assert store.list_representations() and all(r.service_id != "a" for r in store.list_representations())
        assert store.list_ratings("a") == [] and store.list_qos("a") == []
        g = store.get_graph()
        assert g.nodes == frozenset("bc") and g.edges == frozenset({("b", "c")})


class TestPersistence:
    def test_reopen_is_byte_stable(self, store, tmp_path):
        _populate(store)
        store.close()
        root = tmp_path / "db"
        before = {p.name: p.read_bytes() for p in root.glob("*.jsonl")}
        with Store(root, writable=True) as again:
            again._dirty.update(p.removesuffix(".jsonl") for p in before)  # rewrite every file
            again.flush()
        after = {p.name: p.read_bytes() for p in root.glob("*.jsonl")}
        assert before == after

    def test_insertion_order_does_not_matter(self, tmp_path):
        sids = ["m", "c", "x", "a"]
        dumps = []
        for order, name in ((sids, "one"), (sorted(sids), "two")):
            with Store(tmp_path / name, writable=True) as s:
                for sid in order:
                    s.put_service(service(sid))
            dumps.append((tmp_path / name / "services.jsonl").read_bytes())
        assert dumps[0] == dumps[1]

    def test_contents_survive_reopen(self, store, tmp_path):
        _populate(store)
        expected = [r.to_dict() for r in store.list_representations()]
        store.close()
        assert [r.to_dict() for r in Store(tmp_path / "db").list_representations()] == expected


class TestLocking:
    def test_second_writer_refused(self, store, tmp_path):
        with pytest.raises(StoreLocked):
            Store(tmp_path / "db", writable=True)

    def test_reader_refused_while_writing(self, store, tmp_path):
        with pytest.raises(StoreLocked):
            Store(tmp_path / "db")

    def test_writer_after_close(self, store, tmp_path):
        store.close()
        with Store(tmp_path / "db", writable=True):
            pass


class TestTermStats:
    def test_example(self, store):
        _populate(store)
        stats = term_stats(store, Kind.B)
        assert stats.M == 3
        assert stats.df == {"citi": 2, "currenc": 1, "weather": 2}
        assert stats.cooccurrence("weather", "citi") == 1
        assert stats.cooccurrence("currenc", "weather") == 0
        assert stats.n("absent") == 0

    def test_empty(self, store):
        with pytest.raises(EmptyCorpus):
            term_stats(store, Kind.B)

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(
            st.dictionaries(st.sampled_from("abcdefg"), st.integers(1, 5), min_size=1),
            min_size=1,
            max_size=8,
        )
    )
    def test_recount_oracle(self, tmp_path_factory, vectors):
        root = tmp_path_factory.mktemp("ts")
        with Store(root, writable=True) as s, s.batch():
            for i, terms in enumerate(vectors):
                s.put_service(service(f"s{i}"))
                s.put_representation(Representation(f"s{i}", Kind.B, terms))
            stats = term_stats(s, Kind.B)
        df = Counter(t for v in vectors for t in v)
        assert stats.M == len(vectors)
        assert stats.df == dict(df)
        for x in "abc":
            for y in "cde":
                assert stats.cooccurrence(x, y) == sum(1 for v in vectors if x in v and y in v)
