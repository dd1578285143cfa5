"""Core record types for the structural symbol graph.

A repository is indexed into ``SymbolRecord`` nodes connected by typed
``StructuralEdge`` edges. Two synthetic node flavors exist alongside parsed
declarations: per-file roots (kind ``file``) that anchor the containment
forest, and ``unresolved:<name>`` sentinels standing in for call targets the
resolver could not find.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class SymbolKind(str, Enum):
    NAMESPACE = "namespace"
    CLASS = "class"
    STRUCT = "struct"
    ENUM = "enum"
    FREE_FUNCTION = "free_function"
    MEMBER_FUNCTION = "member_function"
    CONSTRUCTOR = "constructor"
    VARIABLE = "variable"
    TEMPLATE_CLASS = "template_class"
    TEMPLATE_FUNCTION = "template_function"
    FORWARD_DECLARATION = "forward_declaration"
    # synthetic containment root, one per source unit
    FILE = "file"


class EdgeKind(str, Enum):
    CONTAINS = "contains"
    INHERITS_FROM = "inherits_from"
    CALLS = "calls"
    OVERLOAD_OF = "overload_of"
    OVERRIDES = "overrides"


FUNCTION_KINDS = frozenset(
    {
        SymbolKind.FREE_FUNCTION,
        SymbolKind.MEMBER_FUNCTION,
        SymbolKind.CONSTRUCTOR,
        SymbolKind.TEMPLATE_FUNCTION,
    }
)

CLASS_KINDS = frozenset(
    {SymbolKind.CLASS, SymbolKind.STRUCT, SymbolKind.TEMPLATE_CLASS}
)

UNRESOLVED_PREFIX = "unresolved:"


@dataclass(frozen=True)
class Location:
    """Line span inside one source unit. Lines are 1-based, end inclusive."""

    file: str
    start_line: int
    end_line: int

    def __post_init__(self):
        if self.start_line > self.end_line:
            raise ValueError(f"bad span {self.start_line}..{self.end_line}")

    def to_dict(self) -> dict:
        return {
            "file": self.file,
            "start_line": self.start_line,
            "end_line": self.end_line,
        }

    @staticmethod
    def from_dict(d: dict) -> "Location":
        return Location(d["file"], d["start_line"], d["end_line"])


@dataclass
class SymbolRecord:
    """One node of the structural graph.

    ``qualified_name`` is built from lexical nesting and always ends with
    ``name``. ``signature`` is the normalized parameter list for function
    kinds and empty otherwise. ``doc_comment`` carries the comment block
    immediately above the declaration, when one exists.
    """

    symbol_id: int
    kind: SymbolKind
    name: str
    qualified_name: str
    signature: str = ""
    location: Location = field(default_factory=lambda: Location("", 0, 0))
    is_definition: bool = True
    template_params: str = ""
    doc_comment: str = ""
    is_virtual: bool = False
    has_override: bool = False

    @property
    def is_synthetic(self) -> bool:
        return self.kind is SymbolKind.FILE or self.qualified_name.startswith(
            UNRESOLVED_PREFIX
        )

    def to_dict(self) -> dict:
        return {
            "symbol_id": self.symbol_id,
            "kind": self.kind.value,
            "name": self.name,
            "qualified_name": self.qualified_name,
            "signature": self.signature,
            "location": self.location.to_dict(),
            "is_definition": self.is_definition,
            "template_params": self.template_params,
            "doc_comment": self.doc_comment,
            "is_virtual": self.is_virtual,
            "has_override": self.has_override,
        }

    @staticmethod
    def from_dict(d: dict) -> "SymbolRecord":
        return SymbolRecord(
            symbol_id=d["symbol_id"],
            kind=SymbolKind(d["kind"]),
            name=d["name"],
            qualified_name=d["qualified_name"],
            signature=d["signature"],
            location=Location.from_dict(d["location"]),
            is_definition=d["is_definition"],
            template_params=d["template_params"],
            doc_comment=d["doc_comment"],
            is_virtual=d["is_virtual"],
            has_override=d["has_override"],
        )


@dataclass(frozen=True, order=True)
class StructuralEdge:
    """Directed typed edge; ``src`` and ``dst`` are symbol ids."""

    kind: EdgeKind
    src: int
    dst: int

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "from": self.src, "to": self.dst}

    @staticmethod
    def from_dict(d: dict) -> "StructuralEdge":
        return StructuralEdge(EdgeKind(d["kind"]), d["from"], d["to"])


@dataclass(frozen=True)
class CallSite:
    """One call expression, kept separately from the deduplicated edge list
    because a caller may invoke the same callee several times."""

    caller: int
    callee: int
    location: Location

    def to_dict(self) -> dict:
        return {
            "caller": self.caller,
            "callee": self.callee,
            "call_site": self.location.to_dict(),
        }

    @staticmethod
    def from_dict(d: dict) -> "CallSite":
        return CallSite(d["caller"], d["callee"], Location.from_dict(d["call_site"]))
