"""Parsed web-service records and their JSON round-trip."""

from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass, field
from typing import Any


class WsdlVersion(str, enum.Enum):
    V1_1 = "V1_1"
    V2_0 = "V2_0"


class BindingStyle(str, enum.Enum):
    RPC = "RPC"
    DOCUMENT = "Document"
    UNKNOWN = "Unknown"


class TypeKind(str, enum.Enum):
    ELEMENT = "Element"
    COMPLEX_TYPE = "ComplexType"
    SIMPLE_TYPE = "SimpleType"
    ATTRIBUTE = "Attribute"
    ENUMERATION = "Enumeration"


@dataclass(frozen=True)
class ParamRecord:
    name: str
    type_ref: str = ""
    # True when type_ref does not resolve into the document's declared types
    external: bool = False


@dataclass(frozen=True)
class OperationRecord:
    name: str
    documentation: str = ""
    inputs: tuple[ParamRecord, ...] = ()
    outputs: tuple[ParamRecord, ...] = ()


@dataclass(frozen=True)
class EndpointRecord:
    name: str
    address: str
    binding_name: str = ""
    binding_style: BindingStyle = BindingStyle.UNKNOWN
    transport: str = ""


@dataclass(frozen=True)
class TypeRecord:
    kind: TypeKind
    name: str
    member_names: tuple[str, ...] = ()


@dataclass(frozen=True)
class ServiceRecord:
    id: str
    name: str
    wsdl_uri: str
    documentation: str = ""
    wsdl_version: WsdlVersion = WsdlVersion.V1_1
    endpoints: tuple[EndpointRecord, ...] = ()
    operations: tuple[OperationRecord, ...] = ()
    declared_types: tuple[TypeRecord, ...] = ()
    category: str | None = None
    language: str = "unknown"

    def to_dict(self) -> dict[str, Any]:
        return _plain(dataclasses.asdict(self))

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ServiceRecord":
        return cls(
            id=d["id"],
            name=d["name"],
            wsdl_uri=d["wsdl_uri"],
            documentation=d.get("documentation", ""),
            wsdl_version=WsdlVersion(d.get("wsdl_version", "V1_1")),
            endpoints=tuple(
                EndpointRecord(
                    name=e["name"],
                    address=e["address"],
                    binding_name=e.get("binding_name", ""),
                    binding_style=BindingStyle(e.get("binding_style", "Unknown")),
                    transport=e.get("transport", ""),
                )
                for e in d.get("endpoints", ())
            ),
            operations=tuple(
                OperationRecord(
                    name=o["name"],
                    documentation=o.get("documentation", ""),
                    inputs=tuple(ParamRecord(**p) for p in o.get("inputs", ())),
                    outputs=tuple(ParamRecord(**p) for p in o.get("outputs", ())),
                )
                for o in d.get("operations", ())
            ),
            declared_types=tuple(
                TypeRecord(TypeKind(t["kind"]), t["name"], tuple(t.get("member_names", ())))
                for t in d.get("declared_types", ())
            ),
            category=d.get("category"),
            language=d.get("language", "unknown"),
        )


def _plain(obj: Any) -> Any:
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj
