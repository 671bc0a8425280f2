"""WSDL 1.1/2.0 parsing, availability and language filtering, manifest ingestion."""

from __future__ import annotations

import dataclasses
import enum
import hashlib
import json
import logging
import os
import urllib.request
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Iterable
from urllib.parse import urlsplit, urlunsplit

from .errors import ManifestError, ParseError, UnsupportedVersion
from .records import (
    BindingStyle,
    EndpointRecord,
    OperationRecord,
    ParamRecord,
    ServiceRecord,
    TypeKind,
    TypeRecord,
    WsdlVersion,
)
from .text.language import DEFAULT_THRESHOLD, detect_language

if TYPE_CHECKING:
    from .store import Store

log = logging.getLogger(__name__)

WSDL11_NS = "http://schemas.xmlsoap.org/wsdl/"
WSDL20_NS = "http://www.w3.org/ns/wsdl"
XSD_NS = "http://www.w3.org/2001/XMLSchema"
SOAP11_NS = "http://schemas.xmlsoap.org/wsdl/soap/"
SOAP12_NS = "http://schemas.xmlsoap.org/wsdl/soap12/"
HTTP_NS = "http://schemas.xmlsoap.org/wsdl/http/"
WSOAP_NS = "http://www.w3.org/ns/wsdl/soap"

_GLOBAL_DECLS = {
    "element": TypeKind.ELEMENT,
    "complexType": TypeKind.COMPLEX_TYPE,
    "simpleType": TypeKind.SIMPLE_TYPE,
    "attribute": TypeKind.ATTRIBUTE,
}


def _split(tag: str) -> tuple[str, str]:
    if tag.startswith("{"):
        ns, _, local = tag[1:].partition("}")
        return ns, local
    return "", tag


def _local(qname: str | None) -> str:
    if not qname:
        return ""
    return qname.rpartition(":")[2]


def _children(el: ET.Element, ns: str, local: str) -> list[ET.Element]:
    return [c for c in el if c.tag == f"{{{ns}}}{local}"]


def _documentation(el: ET.Element, ns: str) -> str:
    parts = ["".join(d.itertext()).strip() for d in _children(el, ns, "documentation")]
    return "\n\n".join(p for p in parts if p)


def canonical_uri(uri: str) -> str:
    """Normalise a WSDL location so that equivalent spellings hash alike."""
    uri = uri.strip()
    parts = urlsplit(uri)
    if parts.scheme.lower() in ("http", "https", "ftp"):
        return urlunsplit(
            (parts.scheme.lower(), parts.netloc.lower(), parts.path or "/", parts.query, "")
        )
    if parts.scheme.lower() == "file":
        return uri
    return os.path.normpath(uri).replace(os.sep, "/")


def service_id(uri: str, name: str | None = None) -> str:
    key = canonical_uri(uri) if name is None else f"{canonical_uri(uri)}#{name}"
    return hashlib.sha256(key.encode("utf-8")).hexdigest()[:16]


class _Schema:
    """Global XSD declarations of a document, indexed by local name."""

    def __init__(self, types_el: ET.Element | None):
        self.records: list[TypeRecord] = []
        self.elements: dict[str, ET.Element] = {}
        self.complex_types: dict[str, ET.Element] = {}
        self.names: set[str] = set()
        if types_el is None:
            return
        for schema in types_el.iter(f"{{{XSD_NS}}}schema"):
            for decl in schema:
                ns, local = _split(decl.tag)
                if ns != XSD_NS or local not in _GLOBAL_DECLS or not decl.get("name"):
                    continue
                name = decl.get("name")
                kind = _GLOBAL_DECLS[local]
                if local == "element":
                    self.elements.setdefault(name, decl)
                elif local == "complexType":
                    self.complex_types.setdefault(name, decl)
                members = tuple(self._member_names(decl))
                if local == "simpleType" and decl.find(f".//{{{XSD_NS}}}enumeration") is not None:
                    kind = TypeKind.ENUMERATION
                self.records.append(TypeRecord(kind, name, members))
        self.names = {r.name for r in self.records}

    @staticmethod
    def _member_names(decl: ET.Element) -> Iterable[str]:
        for sub in decl.iter():
            if sub is decl:
                continue
            ns, local = _split(sub.tag)
            if ns != XSD_NS:
                continue
            if local in ("element", "attribute"):
                name = sub.get("name") or _local(sub.get("ref"))
                if name:
                    yield name
            elif local == "enumeration" and sub.get("value"):
                yield sub.get("value")

    def _is_external(self, type_ref: str) -> bool:
        return bool(type_ref) and _local(type_ref) not in self.names

    def _content_elements(self, ctype: ET.Element, seen: set[str]) -> list[ET.Element]:
        # Element declarations forming the content of a complex type, without
        # descending into the anonymous types of those elements.
        found: list[ET.Element] = []

        def walk(node: ET.Element) -> None:
            for child in node:
                ns, local = _split(child.tag)
                if ns != XSD_NS:
                    continue
                if local == "element":
                    found.append(child)
                elif local == "extension" and child.get("base"):
                    base = self.complex_types.get(_local(child.get("base")))
                    if base is not None and child.get("base") not in seen:
                        seen.add(child.get("base"))
                        found.extend(self._content_elements(base, seen))
                    walk(child)
                elif local in ("sequence", "all", "choice", "complexContent", "group"):
                    walk(child)

        walk(ctype)
        return found

    def _param(self, decl: ET.Element) -> ParamRecord:
        ref = decl.get("ref")
        name = decl.get("name") or _local(ref)
        type_ref = decl.get("type") or ref or ""
        return ParamRecord(name=name, type_ref=type_ref, external=self._is_external(type_ref))

    def element_params(self, qname: str) -> list[ParamRecord]:
        """Flatten a message element into the parameters it wraps."""
        el = self.elements.get(_local(qname))
        if el is None:
            return [ParamRecord(_local(qname), qname, external=True)]
        ctype = el.find(f"{{{XSD_NS}}}complexType")
        if ctype is None and el.get("type"):
            ctype = self.complex_types.get(_local(el.get("type")))
        if ctype is not None:
            members = self._content_elements(ctype, set())
            # an empty wrapper means an operation without parameters
            return [self._param(m) for m in members]
        return [self._param(el)]

    def type_param(self, name: str, type_ref: str) -> ParamRecord:
        return ParamRecord(name=name, type_ref=type_ref, external=self._is_external(type_ref))


def _parse_root(document: str | bytes) -> ET.Element:
    try:
        return ET.fromstring(document)
    except ET.ParseError as exc:
        raise ParseError(f"malformed XML: {exc}") from exc


def parse_wsdl(document: str | bytes, uri: str) -> list[ServiceRecord]:
    """Parse a WSDL document into one :class:`ServiceRecord` per service element.

    Raises ``ParseError`` on malformed XML or a document without services,
    ``UnsupportedVersion`` when the root is neither a WSDL 1.1 ``definitions``
    nor a WSDL 2.0 ``description``.
    """
    root = _parse_root(document)
    ns, local = _split(root.tag)
    if ns == WSDL11_NS and local == "definitions":
        services = _parse_v11(root, uri)
    elif ns == WSDL20_NS and local == "description":
        services = _parse_v20(root, uri)
    else:
        raise UnsupportedVersion(f"root element {root.tag!r} is not WSDL 1.1 or 2.0")
    if not services:
        raise ParseError("document declares no service element")
    return services


def _join_docs(*docs: str) -> str:
    return "\n\n".join(d for d in docs if d)


def _assign_ids(uri: str, built: list[dict]) -> list[ServiceRecord]:
    single = len(built) == 1
    return [
        ServiceRecord(id=service_id(uri, None if single else b["name"]), wsdl_uri=uri, **b)
        for b in built
    ]


def _parse_v11(root: ET.Element, uri: str) -> list[ServiceRecord]:
    W = WSDL11_NS
    schema = _Schema(next(iter(_children(root, W, "types")), None))
    top_doc = _documentation(root, W)

    messages: dict[str, list[ParamRecord]] = {}
    for msg in _children(root, W, "message"):
        params: list[ParamRecord] = []
        for part in _children(msg, W, "part"):
            if part.get("element"):
                params.extend(schema.element_params(part.get("element")))
            else:
                params.append(schema.type_param(part.get("name", ""), part.get("type", "")))
        messages[msg.get("name", "")] = [p for p in params if p.name]

    def io(op: ET.Element, which: str) -> tuple[ParamRecord, ...]:
        el = next(iter(_children(op, W, which)), None)
        if el is None:
            return ()
        return tuple(messages.get(_local(el.get("message")), ()))

    port_types: dict[str, list[OperationRecord]] = {}
    for pt in _children(root, W, "portType"):
        port_types[pt.get("name", "")] = [
            OperationRecord(
                name=op.get("name", ""),
                documentation=_documentation(op, W),
                inputs=io(op, "input"),
                outputs=io(op, "output"),
            )
            for op in _children(pt, W, "operation")
            if op.get("name")
        ]

    bindings: dict[str, tuple[str, BindingStyle, str]] = {}
    for b in _children(root, W, "binding"):
        style, transport = BindingStyle.UNKNOWN, ""
        for child in b:
            cns, clocal = _split(child.tag)
            if clocal == "binding" and cns in (SOAP11_NS, SOAP12_NS):
                raw = (child.get("style") or "document").lower()
                style = BindingStyle.RPC if raw == "rpc" else BindingStyle.DOCUMENT
                transport = child.get("transport", "")
            elif clocal == "binding" and cns == HTTP_NS:
                transport = f"http:{child.get('verb', '')}".rstrip(":")
        bindings[b.get("name", "")] = (_local(b.get("type")), style, transport)

    built = []
    for svc in _children(root, W, "service"):
        endpoints = []
        used_port_types: list[str] = []
        for port in _children(svc, W, "port"):
            binding_name = _local(port.get("binding"))
            pt_name, style, transport = bindings.get(binding_name, ("", BindingStyle.UNKNOWN, ""))
            address = next(
                (c.get("location") for c in port if _split(c.tag)[1] == "address" and c.get("location")),
                None,
            )
            if address:
                endpoints.append(
                    EndpointRecord(port.get("name", ""), address, binding_name, style, transport)
                )
            if pt_name in port_types and pt_name not in used_port_types:
                used_port_types.append(pt_name)
        if not used_port_types:
            used_port_types = list(port_types)
        built.append(
            dict(
                name=svc.get("name", ""),
                documentation=_join_docs(top_doc, _documentation(svc, W)),
                wsdl_version=WsdlVersion.V1_1,
                endpoints=tuple(endpoints),
                operations=tuple(op for pt in used_port_types for op in port_types[pt]),
                declared_types=tuple(schema.records),
            )
        )
    return _assign_ids(uri, built)


def _parse_v20(root: ET.Element, uri: str) -> list[ServiceRecord]:
    W = WSDL20_NS
    schema = _Schema(next(iter(_children(root, W, "types")), None))
    top_doc = _documentation(root, W)

    def io(op: ET.Element, which: str) -> tuple[ParamRecord, ...]:
        params: list[ParamRecord] = []
        for el in _children(op, W, which):
            element = el.get("element", "")
            if element and not element.startswith("#"):
                params.extend(schema.element_params(element))
        return tuple(p for p in params if p.name)

    interfaces: dict[str, list[OperationRecord]] = {}
    rpc_interfaces: set[str] = set()
    for itf in _children(root, W, "interface"):
        name = itf.get("name", "")
        ops = []
        for op in _children(itf, W, "operation"):
            if not op.get("name"):
                continue
            if "rpc" in (op.get("style") or ""):
                rpc_interfaces.add(name)
            ops.append(
                OperationRecord(op.get("name"), _documentation(op, W), io(op, "input"), io(op, "output"))
            )
        interfaces[name] = ops

    bindings: dict[str, tuple[BindingStyle, str]] = {}
    for b in _children(root, W, "binding"):
        btype = b.get("type", "")
        itf = _local(b.get("interface"))
        if itf in rpc_interfaces:
            style = BindingStyle.RPC
        elif btype == WSOAP_NS:
            style = BindingStyle.DOCUMENT
        else:
            style = BindingStyle.UNKNOWN
        transport = b.get(f"{{{WSOAP_NS}}}protocol", "")
        bindings[b.get("name", "")] = (style, transport)

    built = []
    for svc in _children(root, W, "service"):
        endpoints = []
        for ep in _children(svc, W, "endpoint"):
            binding_name = _local(ep.get("binding"))
            style, transport = bindings.get(binding_name, (BindingStyle.UNKNOWN, ""))
            if ep.get("address"):
                endpoints.append(
                    EndpointRecord(ep.get("name", ""), ep.get("address"), binding_name, style, transport)
                )
        itf = _local(svc.get("interface"))
        built.append(
            dict(
                name=svc.get("name", ""),
                documentation=_join_docs(top_doc, _documentation(svc, W)),
                wsdl_version=WsdlVersion.V2_0,
                endpoints=tuple(endpoints),
                operations=tuple(interfaces.get(itf, ())),
                declared_types=tuple(schema.records),
            )
        )
    return _assign_ids(uri, built)


class Availability(str, enum.Enum):
    AVAILABLE = "Available"
    UNAVAILABLE = "Unavailable"


def _is_url(source: str) -> bool:
    return urlsplit(source).scheme.lower() in ("http", "https")


def check_availability(uri: str, timeout: float = 10.0, *, offline: bool = False) -> Availability:
    """Probe a WSDL location; any failure maps to ``Unavailable``.

    In offline mode the probe is skipped and the service counts as available.
    """
    if offline:
        return Availability.AVAILABLE
    if not _is_url(uri):
        return Availability.AVAILABLE if os.access(uri, os.R_OK) else Availability.UNAVAILABLE
    try:
        with urllib.request.urlopen(urllib.request.Request(uri), timeout=timeout) as resp:
            ok = 200 <= resp.status < 300
    except Exception:  # noqa: BLE001 - refused, timeout, HTTP error, bad URL
        return Availability.UNAVAILABLE
    return Availability.AVAILABLE if ok else Availability.UNAVAILABLE


@dataclass(frozen=True)
class ManifestEntry:
    source: str
    category: str | None = None


@dataclass
class CorpusManifest:
    entries: list[ManifestEntry] = field(default_factory=list)
    base_dir: Path = Path(".")

    def resolve(self, source: str) -> str:
        if _is_url(source) or os.path.isabs(source):
            return source
        return str(self.base_dir / source)


def load_manifest(path: str | Path) -> CorpusManifest:
    """Read a JSON-lines manifest of ``{"source": ..., "category": ...}`` objects."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            obj = json.loads(line)
            source = obj["source"]
        except (ValueError, KeyError, TypeError) as exc:
            raise ManifestError(f"{path}:{lineno}: bad manifest entry: {exc}") from exc
        if not isinstance(source, str) or not source:
            raise ManifestError(f"{path}:{lineno}: source must be a nonempty string")
        if source in seen:
            raise ManifestError(f"{path}:{lineno}: duplicate source {source!r}")
        seen.add(source)
        entries.append(ManifestEntry(source, obj.get("category")))
    return CorpusManifest(entries, path.parent)


@dataclass
class IngestReport:
    parsed: int = 0
    discarded_unavailable: int = 0
    discarded_language: int = 0
    discarded_invalid: int = 0
    services: int = 0

    @property
    def total(self) -> int:
        return self.parsed + self.discarded_unavailable + self.discarded_language + self.discarded_invalid

    def to_dict(self) -> dict[str, int]:
        return {
            "parsed": self.parsed,
            "discarded_unavailable": self.discarded_unavailable,
            "discarded_language": self.discarded_language,
            "discarded_invalid": self.discarded_invalid,
            "services": self.services,
        }


def _read_source(location: str, timeout: float) -> bytes | None:
    try:
        if _is_url(location):
            with urllib.request.urlopen(location, timeout=timeout) as resp:
                return resp.read()
        return Path(location).read_bytes()
    except Exception as exc:  # noqa: BLE001
        log.info("cannot read %s: %s", location, exc)
        return None


def _language_text(svc: ServiceRecord) -> str:
    return "\n".join([svc.documentation, *(op.documentation for op in svc.operations)])


def ingest_corpus(
    manifest: CorpusManifest,
    store: "Store",
    *,
    check_online: bool = False,
    timeout: float = 10.0,
    language_threshold: float = DEFAULT_THRESHOLD,
) -> IngestReport:
    """Parse every manifest entry and persist the available English services.

    Each entry lands in exactly one report bucket.  Services whose language
    cannot be identified (typically empty descriptions) are kept.
    """
    report = IngestReport()
    with store.batch():
        for entry in manifest.entries:
            location = manifest.resolve(entry.source)
            if check_online and check_availability(location, timeout) is Availability.UNAVAILABLE:
                report.discarded_unavailable += 1
                continue
            document = _read_source(location, timeout)
            if document is None:
                report.discarded_unavailable += 1
                continue
            try:
                services = parse_wsdl(document, entry.source)
            except ParseError as exc:
                log.info("discarding %s: %s", entry.source, exc)
                report.discarded_invalid += 1
                continue
            kept = []
            for svc in services:
                lang = detect_language(_language_text(svc), language_threshold)
                if lang in ("en", "unknown"):
                    kept.append(dataclasses.replace(svc, category=entry.category, language=lang))
            if not kept:
                report.discarded_language += 1
                continue
            for svc in kept:
                store.put_service(svc)
            report.parsed += 1
            report.services += len(kept)
    return report
