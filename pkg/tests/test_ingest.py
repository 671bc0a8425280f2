from __future__ import annotations

import http.server
import json
import socket
import threading
from pathlib import Path

import pytest

from wsrep.errors import ManifestError, ParseError, UnsupportedVersion
from wsrep.ingest import (
    Availability,
    CorpusManifest,
    ManifestEntry,
    canonical_uri,
    check_availability,
    ingest_corpus,
    load_manifest,
    parse_wsdl,
    service_id,
)
from wsrep.records import BindingStyle, ServiceRecord, TypeKind, WsdlVersion

DATA = Path(__file__).parent / "data"


def _read(name: str) -> bytes:
    return (DATA / name).read_bytes()


class TestParseV11:
    def test_single_service_fixture(self):
        [svc] = parse_wsdl(_read("weather.wsdl"), "http://example.org/weather?wsdl")
        assert svc.name == "Weather"
        assert svc.wsdl_version is WsdlVersion.V1_1
        assert len(svc.endpoints) == 1 and len(svc.operations) == 1
        op = svc.operations[0]
        assert op.name == "GetWeather"
        assert [p.name for p in op.inputs] == ["City"]
        assert [p.name for p in op.outputs] == ["Forecast"]
        assert len(op.inputs) + len(op.outputs) == 2
        assert op.documentation == "Current forecast for a city."

    def test_features(self):
        [svc] = parse_wsdl(_read("weather.wsdl"), "u")
        assert svc.documentation == "Weather forecasts for cities.\n\nThe Weather web service."
        ep = svc.endpoints[0]
        assert (ep.name, ep.address, ep.binding_name) == ("WeatherPort", "http://example.org/weather", "WeatherSoapBinding")
        assert ep.binding_style is BindingStyle.DOCUMENT
        assert ep.transport == "http://schemas.xmlsoap.org/soap/http"
        kinds = {t.name: t.kind for t in svc.declared_types}
        assert kinds == {
            "GetWeather": TypeKind.ELEMENT,
            "GetWeatherResponse": TypeKind.ELEMENT,
            "ForecastType": TypeKind.COMPLEX_TYPE,
            "SkyKind": TypeKind.ENUMERATION,
        }
        members = {t.name: t.member_names for t in svc.declared_types}
        assert members["ForecastType"] == ("Temperature", "Sky", "unit")
        assert members["SkyKind"] == ("Sunny", "Cloudy")

    def test_type_refs_resolve_or_are_external(self):
        [svc] = parse_wsdl(_read("weather.wsdl"), "u")
        declared = {t.name for t in svc.declared_types}
        for op in svc.operations:
            for p in (*op.inputs, *op.outputs):
                local = p.type_ref.rpartition(":")[2]
                assert p.external or local in declared
        [forecast] = svc.operations[0].outputs
        assert forecast.type_ref == "tns:ForecastType" and not forecast.external
        [city] = svc.operations[0].inputs
        assert city.external  # xs:string is not declared in the document

    def test_rpc_parts_and_multiple_services(self):
        svcs = parse_wsdl(_read("rpc_nodoc.wsdl"), "http://example.org/calc?wsdl")
        assert [s.name for s in svcs] == ["Calc", "CalcMirror"]
        assert len({s.id for s in svcs}) == 2
        calc = svcs[0]
        assert calc.documentation == ""
        assert all(op.documentation == "" for op in calc.operations)
        add, ping = calc.operations
        assert [p.name for p in add.inputs] == ["a", "b"] and [p.name for p in add.outputs] == ["sum"]
        assert ping.inputs == ()
        assert calc.endpoints[0].binding_style is BindingStyle.RPC

    def test_deterministic(self):
        a = [s.to_dict() for s in parse_wsdl(_read("weather.wsdl"), "u")]
        b = [s.to_dict() for s in parse_wsdl(_read("weather.wsdl"), "u")]
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)

    def test_record_round_trip(self):
        [svc] = parse_wsdl(_read("weather.wsdl"), "u")
        assert ServiceRecord.from_dict(json.loads(json.dumps(svc.to_dict()))) == svc


class TestParseV20:
    def test_hotel(self):
        [svc] = parse_wsdl(_read("hotel20.wsdl"), "http://example.org/hotel?wsdl")
        assert svc.wsdl_version is WsdlVersion.V2_0
        assert svc.name == "ReservationService"
        assert svc.documentation == "Hotel room reservations."
        [op] = svc.operations
        assert [p.name for p in op.inputs] == ["CheckInDate", "CheckOutDate", "RoomType"]
        assert [p.name for p in op.outputs] == ["CheckAvailabilityResponse"]
        [ep] = svc.endpoints
        assert ep.address == "http://example.org/hotel/reservation"
        assert ep.binding_style is BindingStyle.DOCUMENT


class TestParseErrors:
    def test_truncated(self):
        with pytest.raises(ParseError):
            parse_wsdl(_read("truncated.wsdl"), "u")

    def test_not_wsdl(self):
        with pytest.raises(UnsupportedVersion):
            parse_wsdl(_read("notwsdl.xml"), "u")

    def test_no_service(self):
        doc = '<definitions xmlns="http://schemas.xmlsoap.org/wsdl/"/>'
        with pytest.raises(ParseError):
            parse_wsdl(doc, "u")


class TestIds:
    def test_stable_and_canonical(self):
        assert service_id("HTTP://Example.org/a?wsdl") == service_id("http://example.org/a?wsdl")
        assert len(service_id("x")) == 16
        assert canonical_uri("dir/../a.wsdl") == "a.wsdl"

    def test_multi_service_ids_differ(self):
        assert service_id("u", "A") != service_id("u", "B")


@pytest.fixture
def http_server():
    class Handler(http.server.BaseHTTPRequestHandler):
        def do_GET(self):
            if self.path.startswith("/ok"):
                body = _read("weather.wsdl")
                self.send_response(200)
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)
            else:
                self.send_error(404)

        def log_message(self, *args):
            pass

    server = http.server.HTTPServer(("127.0.0.1", 0), Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}"
    server.shutdown()
    server.server_close()


def _free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


class TestAvailability:
    def test_refused(self):
        assert check_availability(f"http://127.0.0.1:{_free_port()}/x", timeout=2) is Availability.UNAVAILABLE

    def test_local_server(self, http_server):
        assert check_availability(f"{http_server}/ok", timeout=5) is Availability.AVAILABLE
        assert check_availability(f"{http_server}/missing", timeout=5) is Availability.UNAVAILABLE

    def test_offline(self):
        assert check_availability("http://nowhere.invalid/", offline=True) is Availability.AVAILABLE


def _manifest(tmp_path: Path, rows: list[dict]) -> Path:
    path = tmp_path / "manifest.jsonl"
    path.write_text("".join(json.dumps(r) + "\n" for r in rows))
    return path


class TestManifest:
    def test_load(self, tmp_path):
        path = _manifest(tmp_path, [{"source": "a.wsdl", "category": "Weather"}, {"source": "b.wsdl"}])
        m = load_manifest(path)
        assert m.entries == [ManifestEntry("a.wsdl", "Weather"), ManifestEntry("b.wsdl", None)]
        assert m.resolve("a.wsdl") == str(tmp_path / "a.wsdl")

    def test_duplicates(self, tmp_path):
        with pytest.raises(ManifestError):
            load_manifest(_manifest(tmp_path, [{"source": "a"}, {"source": "a"}]))

    def test_unreadable(self, tmp_path):
        with pytest.raises(ManifestError):
            load_manifest(tmp_path / "missing.jsonl")

    def test_bad_json(self, tmp_path):
        path = tmp_path / "m.jsonl"
        path.write_text("{not json}\n")
        with pytest.raises(ManifestError):
            load_manifest(path)


class TestIngestCorpus:
    def test_five_fixtures_one_malformed(self, tmp_path, store):
        rows = [
            {"source": str(DATA / "weather.wsdl"), "category": "Weather"},
            {"source": str(DATA / "rpc_nodoc.wsdl"), "category": "Mathematics"},
            {"source": str(DATA / "hotel20.wsdl"), "category": "Travel"},
            {"source": str(DATA / "truncated.wsdl")},
            {"source": str(DATA / "french.wsdl"), "category": "Weather"},
        ]
        report = ingest_corpus(load_manifest(_manifest(tmp_path, rows)), store)
        # the French service is parsed but then discarded by language
        assert report.to_dict() == {
            "parsed": 3,
            "discarded_unavailable": 0,
            "discarded_language": 1,
            "discarded_invalid": 1,
            "services": 4,
        }
        assert report.total == len(rows)
        weather = [s for s in store.list_services() if s.name == "Weather"][0]
        assert weather.category == "Weather" and weather.language == "en"

    def test_four_valid_one_malformed(self, tmp_path, store):
        names = ["weather.wsdl", "rpc_nodoc.wsdl", "hotel20.wsdl"]
        rows = [{"source": str(DATA / n)} for n in names]
        # the same document under a second location counts as a distinct source
        copy = tmp_path / "weather_copy.wsdl"
        copy.write_bytes(_read("weather.wsdl"))
        rows += [{"source": str(copy)}, {"source": str(DATA / "truncated.wsdl")}]
        report = ingest_corpus(load_manifest(_manifest(tmp_path, rows)), store)
        assert report.parsed == 4
        assert report.discarded_invalid == 1
        assert report.total == 5

    def test_empty_manifest(self, store):
        report = ingest_corpus(CorpusManifest([]), store)
        assert report.to_dict() == dict.fromkeys(report.to_dict(), 0)

    def test_unavailable(self, tmp_path, store):
        rows = [{"source": str(tmp_path / "gone.wsdl")}, {"source": f"http://127.0.0.1:{_free_port()}/x"}]
        report = ingest_corpus(load_manifest(_manifest(tmp_path, rows)), store, timeout=2)
        assert report.discarded_unavailable == 2 and report.total == 2

    def test_online_check(self, tmp_path, store, http_server):
        rows = [{"source": f"{http_server}/ok"}, {"source": f"{http_server}/missing"}]
        report = ingest_corpus(load_manifest(_manifest(tmp_path, rows)), store, check_online=True, timeout=5)
        assert report.parsed == 1 and report.discarded_unavailable == 1

    def test_minicorpus(self, store, minicorpus_manifest):
        report = ingest_corpus(load_manifest(minicorpus_manifest), store)
        assert report.parsed == 28 and report.total == 28
        cats = sorted({s.category for s in store.list_services()})
        assert cats == ["Currency Exchange", "Jobs", "SMS", "Weather"]
