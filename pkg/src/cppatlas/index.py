"""Repository-wide structural index: build, resolve, persist.

``build_index`` unions per-unit parses under a global id assignment, then
resolves deferred references:

* base specifiers become ``inherits_from`` edges when a class definition is
  found by walking enclosing scopes innermost-first, then global scope;
* call expressions resolve in three steps: member of the enclosing class,
  then symbol in the innermost enclosing namespace, then global scope; plain
  calls prefer function records and constructor-style calls prefer classes
  (landing on the class's constructor); misses become ``unresolved:<name>``
  sentinel records rather than dropped edges;
* ``overload_of`` edges connect every pair of function records that share a
  scope and name, and ``overrides`` edges link a member function to the
  nearest base-class member with identical name and signature when that base
  member is virtual or the derived one is marked ``override``.

The result is deterministic: identical repositories produce identical
indices, ids, edge lists and serialized bytes.
"""

from __future__ import annotations

import json
import logging
import warnings
from collections import defaultdict
from dataclasses import dataclass, field, replace
from pathlib import Path

from .cxx.parser import ParsedUnit, parse_unit
from .errors import CorruptIndex, VersionMismatch
from .errors import StaleIndexWarning
from .model import (
    CLASS_KINDS,
    FUNCTION_KINDS,
    UNRESOLVED_PREFIX,
    CallSite,
    EdgeKind,
    Location,
    StructuralEdge,
    SymbolKind,
    SymbolRecord,
)
from .repo import Repository

log = logging.getLogger(__name__)

FORMAT_MAGIC = "cppatlas-index"
FORMAT_VERSION = 1

_EDGE_ORDER = {k: i for i, k in enumerate(EdgeKind)}


@dataclass
class StructuralIndex:
    """Symbol graph plus lookup tables and the source text it was built from."""

    symbols: list[SymbolRecord] = field(default_factory=list)
    edges: list[StructuralEdge] = field(default_factory=list)
    call_sites: list[CallSite] = field(default_factory=list)
    by_name: dict[str, list[int]] = field(default_factory=dict)
    by_qualified: dict[str, list[int]] = field(default_factory=dict)
    sources: dict[str, str] = field(default_factory=dict)
    includes: dict[str, list[str]] = field(default_factory=dict)
    repo_snapshot: str = ""
    parse_error_count: int = 0

    def symbol(self, symbol_id: int) -> SymbolRecord:
        return self.symbols[symbol_id]

    def children(self, symbol_id: int) -> list[int]:
        return self._children_map().get(symbol_id, [])

    def parent(self, symbol_id: int) -> int | None:
        return self._parent_map().get(symbol_id)

    def _children_map(self) -> dict[int, list[int]]:
        cached = getattr(self, "_children_cache", None)
        if cached is None:
            cached = defaultdict(list)
            for e in self.edges:
                if e.kind is EdgeKind.CONTAINS:
                    cached[e.src].append(e.dst)
            for ids in cached.values():
                ids.sort()
            object.__setattr__(self, "_children_cache", dict(cached))
            cached = dict(cached)
        return cached

    def _parent_map(self) -> dict[int, int]:
        cached = getattr(self, "_parent_cache", None)
        if cached is None:
            cached = {}
            for e in self.edges:
                if e.kind is EdgeKind.CONTAINS:
                    cached[e.dst] = e.src
            object.__setattr__(self, "_parent_cache", cached)
        return cached

    def enclosing(self, symbol_id: int, kinds: frozenset) -> int | None:
        """Nearest containment ancestor whose kind is in ``kinds``."""
        cur = self.parent(symbol_id)
        while cur is not None:
            if self.symbols[cur].kind in kinds:
                return cur
            cur = self.parent(cur)
        return None

    def edges_of_kind(self, kind: EdgeKind) -> list[StructuralEdge]:
        return [e for e in self.edges if e.kind is kind]

    def __eq__(self, other):
        if not isinstance(other, StructuralIndex):
            return NotImplemented
        return (
            self.symbols == other.symbols
            and self.edges == other.edges
            and self.call_sites == other.call_sites
            and self.by_name == other.by_name
            and self.by_qualified == other.by_qualified
            and self.sources == other.sources
            and self.includes == other.includes
            and self.repo_snapshot == other.repo_snapshot
            and self.parse_error_count == other.parse_error_count
        )


def build_index(repo: Repository) -> StructuralIndex:
    """Parse every header/source unit and assemble the resolved graph."""
    parsed: list[ParsedUnit] = []
    for unit in repo.units:  # units are sorted by path
        if unit.kind in ("header", "source"):
            parsed.append(parse_unit(unit))

    index = StructuralIndex(repo_snapshot=repo.snapshot_id)
    index.sources = {u.path: u.content for u in repo.units}

    offsets: list[int] = []
    next_id = 0
    for pu in parsed:
        offsets.append(next_id)
        for rec in pu.symbols:
            index.symbols.append(replace(rec, symbol_id=next_id))
            next_id += 1
        index.includes[pu.path] = list(pu.includes)
        index.parse_error_count += pu.error_count

    edges: set[StructuralEdge] = set()
    for pu, off in zip(parsed, offsets):
        for parent, child in pu.contains:
            edges.add(
                StructuralEdge(EdgeKind.CONTAINS, parent + off, child + off)
            )

    _build_lookup(index)
    children_of: dict[int, list[int]] = defaultdict(list)
    for e in edges:
        children_of[e.src].append(e.dst)
    for ids in children_of.values():
        ids.sort()

    # --- inheritance -------------------------------------------------
    for pu, off in zip(parsed, offsets):
        for pending in pu.pending_bases:
            derived = pending.derived + off
            base = _resolve_base(index, derived, pending.base_text)
            if base is not None and base != derived:
                edges.add(StructuralEdge(EdgeKind.INHERITS_FROM, derived, base))
            elif base is None:
                log.debug(
                    "unresolved base %r of %s",
                    pending.base_text,
                    index.symbols[derived].qualified_name,
                )

    # --- calls -------------------------------------------------------
    raw_calls: list[tuple[int, str, bool, int, str]] = []
    for pu, off in zip(parsed, offsets):
        for call in pu.pending_calls:
            raw_calls.append(
                (call.caller + off, call.callee_text, call.ctor_style, call.line, pu.path)
            )
    resolved: list[tuple[int, int | str, Location]] = []
    unresolved_names: set[str] = set()
    for caller, callee_text, ctor_style, line, path in raw_calls:
        target = _resolve_call(
            index, children_of, caller, callee_text, ctor_style
        )
        loc = Location(path, line, line)
        if target is None:
            unresolved_names.add(callee_text)
            resolved.append((caller, callee_text, loc))
        else:
            resolved.append((caller, target, loc))

    sentinel_ids: dict[str, int] = {}
    for name in sorted(unresolved_names):
        sid = len(index.symbols)
        index.symbols.append(
            SymbolRecord(
                symbol_id=sid,
                kind=SymbolKind.FREE_FUNCTION,
                name=name,
                qualified_name=f"{UNRESOLVED_PREFIX}{name}",
                location=Location("", 0, 0),
                is_definition=False,
            )
        )
        sentinel_ids[name] = sid

    for caller, target, loc in resolved:
        callee = target if isinstance(target, int) else sentinel_ids[target]
        index.call_sites.append(CallSite(caller, callee, loc))
        edges.add(StructuralEdge(EdgeKind.CALLS, caller, callee))

    _build_lookup(index)  # sentinels joined the table

    # --- overloads ---------------------------------------------------
    groups: dict[tuple[str, str], list[int]] = defaultdict(list)
    for rec in index.symbols:
        if rec.kind in FUNCTION_KINDS and not rec.is_synthetic:
            scope_prefix = rec.qualified_name[: -len(rec.name)].rstrip(":")
            groups[(scope_prefix, rec.name)].append(rec.symbol_id)
    for ids in groups.values():
        if len(ids) < 2:
            continue
        ids.sort()
        for a in range(len(ids)):
            for b in range(a + 1, len(ids)):
                edges.add(StructuralEdge(EdgeKind.OVERLOAD_OF, ids[a], ids[b]))

    # --- overrides ---------------------------------------------------
    bases_of: dict[int, list[int]] = defaultdict(list)
    for e in edges:
        if e.kind is EdgeKind.INHERITS_FROM:
            bases_of[e.src].append(e.dst)
    for ids in bases_of.values():
        ids.sort()

    for rec in index.symbols:
        if rec.kind not in CLASS_KINDS or not rec.is_definition:
            continue
        members = [
            index.symbols[c]
            for c in children_of.get(rec.symbol_id, [])
            if index.symbols[c].kind
            in (SymbolKind.MEMBER_FUNCTION, SymbolKind.TEMPLATE_FUNCTION)
        ]
        for member in members:
            for target in _find_override_targets(
                index, bases_of, children_of, rec.symbol_id, member
            ):
                edges.add(
                    StructuralEdge(EdgeKind.OVERRIDES, member.symbol_id, target)
                )

    index.edges = sorted(edges, key=lambda e: (_EDGE_ORDER[e.kind], e.src, e.dst))
    index.call_sites.sort(
        key=lambda c: (c.location.file, c.location.start_line, c.caller, c.callee)
    )
    _check_closure(index)
    return index


def _build_lookup(index: StructuralIndex):
    by_name: dict[str, list[int]] = defaultdict(list)
    by_qualified: dict[str, list[int]] = defaultdict(list)
    for rec in index.symbols:
        by_name[rec.name].append(rec.symbol_id)
        by_qualified[rec.qualified_name].append(rec.symbol_id)
    index.by_name = {k: sorted(v) for k, v in by_name.items()}
    index.by_qualified = {k: sorted(v) for k, v in by_qualified.items()}


def _scope_prefixes(qualified_name: str) -> list[str]:
    """Enclosing scope prefixes, innermost first, ending with '' (global)."""
    parts = qualified_name.split("::")[:-1]
    return ["::".join(parts[:k]) for k in range(len(parts), -1, -1)]


def _resolve_base(
    index: StructuralIndex, derived: int, base_text: str
) -> int | None:
    """Resolve a base specifier to a class definition id, or None."""
    derived_rec = index.symbols[derived]
    for prefix in _scope_prefixes(derived_rec.qualified_name):
        qualified = f"{prefix}::{base_text}" if prefix else base_text
        candidates = [
            i
            for i in index.by_qualified.get(qualified, [])
            if index.symbols[i].kind in CLASS_KINDS
            and index.symbols[i].is_definition
        ]
        if candidates:
            return candidates[0]
    return None


def _pick_candidate(
    index: StructuralIndex,
    children_of: dict[int, list[int]],
    ids: list[int],
    ctor_style: bool,
) -> int | None:
    """Apply the kind preference shared by all resolution steps."""

    def best(pool: list[int]) -> int | None:
        if not pool:
            return None
        return min(
            pool, key=lambda i: (not index.symbols[i].is_definition, i)
        )

    funcs = [i for i in ids if index.symbols[i].kind in FUNCTION_KINDS]
    classes = [i for i in ids if index.symbols[i].kind in CLASS_KINDS]

    def ctor_of(class_id: int) -> int:
        ctors = [
            c
            for c in children_of.get(class_id, [])
            if index.symbols[c].kind is SymbolKind.CONSTRUCTOR
        ]
        return min(ctors) if ctors else class_id

    if ctor_style:
        chosen = best(classes)
        if chosen is not None:
            return ctor_of(chosen)
        return best(funcs)
    chosen = best(funcs)
    if chosen is not None:
        return chosen
    chosen = best(classes)
    if chosen is not None:
        return ctor_of(chosen)
    return None


def _resolve_call(
    index: StructuralIndex,
    children_of: dict[int, list[int]],
    caller: int,
    callee_text: str,
    ctor_style: bool,
) -> int | None:
    """Three-step lookup for bare callees: member of the enclosing
    class, then the innermost enclosing namespace, then global scope.
    Enclosure comes from the caller's qualified name, so an out-of-line
    member definition still sees its class. Qualified callees walk the
    caller's scope prefixes outward instead."""
    caller_rec = index.symbols[caller]

    if "::" in callee_text:
        for prefix in _scope_prefixes(caller_rec.qualified_name):
            qualified = f"{prefix}::{callee_text}" if prefix else callee_text
            found = _pick_candidate(
                index, children_of, index.by_qualified.get(qualified, []), ctor_style
            )
            if found is not None:
                return found
        return None

    parts = caller_rec.qualified_name.split("::")[:-1]

    def innermost(kinds) -> str | None:
        for k in range(len(parts), 0, -1):
            prefix = "::".join(parts[:k])
            if any(
                index.symbols[i].kind in kinds
                for i in index.by_qualified.get(prefix, [])
            ):
                return prefix
        return None

    scopes: list[str] = []
    cls = innermost(CLASS_KINDS)
    if cls is not None:
        scopes.append(cls)
    ns = innermost((SymbolKind.NAMESPACE,))
    if ns is not None and ns not in scopes:
        scopes.append(ns)
    scopes.append("")
    for scope in scopes:
        qualified = f"{scope}::{callee_text}" if scope else callee_text
        found = _pick_candidate(
            index, children_of, index.by_qualified.get(qualified, []), ctor_style
        )
        if found is not None:
            return found
    return None


def _find_override_targets(
    index: StructuralIndex,
    bases_of: dict[int, list[int]],
    children_of: dict[int, list[int]],
    class_id: int,
    member: SymbolRecord,
) -> list[int]:
    """Nearest-level search over the ancestor lattice for a matching
    virtual member; all matches at the first matching depth are returned."""
    frontier = list(bases_of.get(class_id, []))
    visited = set(frontier)
    while frontier:
        matches: list[int] = []
        for base in frontier:
            for child_id in children_of.get(base, []):
                candidate = index.symbols[child_id]
                if candidate.kind not in (
                    SymbolKind.MEMBER_FUNCTION,
                    SymbolKind.TEMPLATE_FUNCTION,
                ):
                    continue
                if candidate.name != member.name:
                    continue
                if candidate.signature != member.signature:
                    continue
                if candidate.is_virtual or member.has_override:
                    matches.append(child_id)
        if matches:
            return sorted(matches)
        nxt: list[int] = []
        for base in frontier:
            for up in bases_of.get(base, []):
                if up not in visited:
                    visited.add(up)
                    nxt.append(up)
        frontier = sorted(nxt)
    return []


def _check_closure(index: StructuralIndex):
    n = len(index.symbols)
    for i, rec in enumerate(index.symbols):
        if rec.symbol_id != i:
            raise AssertionError("symbol ids are not dense")
        if not rec.qualified_name.endswith(rec.name):
            raise AssertionError(f"qualified name mismatch for {rec.name!r}")
    for e in index.edges:
        if not (0 <= e.src < n and 0 <= e.dst < n):
            raise AssertionError(f"dangling edge {e}")
    parents: dict[int, int] = {}
    for e in index.edges:
        if e.kind is EdgeKind.CONTAINS:
            if e.dst in parents:
                raise AssertionError(f"symbol {e.dst} has two parents")
            parents[e.dst] = e.src
    for rec in index.symbols:
        if rec.is_synthetic:
            if rec.symbol_id in parents:
                raise AssertionError("synthetic symbol must be a root")
        elif rec.symbol_id not in parents:
            raise AssertionError(
                f"symbol {rec.qualified_name} lacks a containment parent"
            )
    # acyclicity: follow parents upward, must terminate
    for start in parents:
        seen = set()
        cur = start
        while cur in parents:
            if cur in seen:
                raise AssertionError("containment cycle")
            seen.add(cur)
            cur = parents[cur]


# ----------------------------------------------------------------------
# persistence


@dataclass
class IndexContainer:
    """What actually lands on disk: the structural graph and, when built,
    the intent index, under one magic header and format version."""

    structural: StructuralIndex
    intent: "object | None" = None  # IntentIndex, kept loose to avoid a cycle

    @property
    def repo_snapshot(self) -> str:
        return self.structural.repo_snapshot


def _structural_to_dict(index: StructuralIndex) -> dict:
    return {
        "symbols": [s.to_dict() for s in index.symbols],
        "edges": [e.to_dict() for e in index.edges],
        "call_sites": [c.to_dict() for c in index.call_sites],
        "sources": index.sources,
        "includes": index.includes,
        "parse_error_count": index.parse_error_count,
    }


def _structural_from_dict(d: dict, snapshot: str) -> StructuralIndex:
    index = StructuralIndex(
        symbols=[SymbolRecord.from_dict(s) for s in d["symbols"]],
        edges=[StructuralEdge.from_dict(e) for e in d["edges"]],
        call_sites=[CallSite.from_dict(c) for c in d["call_sites"]],
        sources=dict(d["sources"]),
        includes={k: list(v) for k, v in d["includes"].items()},
        repo_snapshot=snapshot,
        parse_error_count=d["parse_error_count"],
    )
    _build_lookup(index)
    return index


def persist_index(
    container: IndexContainer | StructuralIndex, path: str | Path
) -> None:
    """Write the versioned container. Identical indices produce identical
    bytes."""
    if isinstance(container, StructuralIndex):
        container = IndexContainer(structural=container)
    intent_dict = None
    if container.intent is not None:
        intent_dict = container.intent.to_dict()
    payload = {
        "format": FORMAT_MAGIC,
        "version": FORMAT_VERSION,
        "repo_snapshot": container.repo_snapshot,
        "structural": _structural_to_dict(container.structural),
        "intent": intent_dict,
    }
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    Path(path).write_text(text + "\n", encoding="utf-8")


def load_index(
    path: str | Path, expected_snapshot: str | None = None
) -> IndexContainer:
    """Read a container back; warns with ``StaleIndexWarning`` when the
    stored snapshot differs from ``expected_snapshot``."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CorruptIndex(f"cannot read index file {path}: {exc}") from exc
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptIndex(f"index file {path} is not valid JSON") from exc
    if not isinstance(payload, dict) or payload.get("format") != FORMAT_MAGIC:
        raise CorruptIndex(f"index file {path} has a foreign or missing header")
    if payload.get("version") != FORMAT_VERSION:
        raise VersionMismatch(
            f"index version {payload.get('version')} != {FORMAT_VERSION}"
        )
    snapshot = payload["repo_snapshot"]
    structural = _structural_from_dict(payload["structural"], snapshot)
    intent = None
    if payload.get("intent") is not None:
        from .intent import IntentIndex

        intent = IntentIndex.from_dict(payload["intent"])
    if expected_snapshot is not None and expected_snapshot != snapshot:
        warnings.warn(
            StaleIndexWarning(
                f"index built from snapshot {snapshot[:12]} but repository "
                f"is at {expected_snapshot[:12]}"
            )
        )
    return IndexContainer(structural=structural, intent=intent)
