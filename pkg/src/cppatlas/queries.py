"""Deterministic structural queries over a built index.

Every function here is a pure read: same index and arguments give the
same answer, byte for byte. Name arguments accept either a fully
qualified spelling ("a::b::C") or a bare identifier; bare lookups that
hit several distinct qualified names raise ``AmbiguousName`` with the
candidate spellings instead of guessing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import (
    AmbiguousName,
    BadRequest,
    NoSeedsResolved,
    NotFound,
    UnknownClass,
    UnknownFunction,
)
from .index import StructuralIndex
from .model import (
    CLASS_KINDS,
    FUNCTION_KINDS,
    EdgeKind,
    SymbolKind,
    SymbolRecord,
)

_SNIPPET_MAX_LINES = 12

# edge kinds that carry locality for defect neighborhoods; overload edges
# are lexical coincidence, not proximity
_SUBGRAPH_KINDS = frozenset(
    {EdgeKind.CONTAINS, EdgeKind.INHERITS_FROM, EdgeKind.CALLS, EdgeKind.OVERRIDES}
)


@dataclass(frozen=True)
class QueryMatch:
    record: SymbolRecord
    snippet: str

    def to_dict(self) -> dict:
        return {"record": self.record.to_dict(), "snippet": self.snippet}


def snippet_for(index: StructuralIndex, record: SymbolRecord) -> str:
    content = index.sources.get(record.location.file)
    if content is None:
        return ""
    lines = content.split("\n")
    start = record.location.start_line
    end = min(record.location.end_line, start + _SNIPPET_MAX_LINES - 1)
    chunk = lines[start - 1 : end]
    if end < record.location.end_line:
        chunk.append("...")
    return "\n".join(chunk)


def _real_records(index: StructuralIndex):
    return [r for r in index.symbols if not r.is_synthetic]


def _lookup_by_name(
    index: StructuralIndex, name: str, kinds: frozenset
) -> list[SymbolRecord]:
    if "::" in name:
        ids = index.by_qualified.get(name, [])
    else:
        ids = index.by_name.get(name, [])
    pool = [index.symbols[i] for i in ids]
    return [r for r in pool if r.kind in kinds and not r.is_synthetic]


def _prefer_definitions(records: list[SymbolRecord]) -> list[SymbolRecord]:
    defs = [r for r in records if r.is_definition]
    return defs if defs else records


def find_class(index: StructuralIndex, name: str) -> SymbolRecord:
    """Resolve a class, struct or class template by bare or qualified
    name. Prefers the definition over forward declarations."""
    matches = _lookup_by_name(index, name, CLASS_KINDS)
    if not matches:
        raise NotFound(f"no class named {name!r}")
    matches = _prefer_definitions(matches)
    qualified = sorted({r.qualified_name for r in matches})
    if len(qualified) > 1:
        raise AmbiguousName(name, qualified)
    matches.sort(key=lambda r: (not r.is_definition, r.symbol_id))
    return matches[0]


def find_function(
    index: StructuralIndex, name: str, signature: str | None = None
) -> list[SymbolRecord]:
    """All function records matching a name, optionally narrowed by the
    normalized signature. Overload sets come back together, sorted."""
    matches = _lookup_by_name(index, name, FUNCTION_KINDS)
    if signature is not None:
        matches = [r for r in matches if r.signature == signature]
    if not matches:
        raise NotFound(f"no function named {name!r}"
                       + (f" with signature {signature!r}" if signature else ""))
    matches.sort(
        key=lambda r: (
            r.qualified_name,
            r.signature,
            not r.is_definition,
            r.location.file,
            r.location.start_line,
        )
    )
    return matches


def _single_function(
    index: StructuralIndex, name: str, signature: str | None
) -> SymbolRecord:
    try:
        matches = find_function(index, name, signature)
    except NotFound as exc:
        raise UnknownFunction(str(exc)) from exc
    matches = _prefer_definitions(matches)
    distinct = sorted({(r.qualified_name, r.signature) for r in matches})
    if len(distinct) > 1:
        raise AmbiguousName(name, [f"{q} {s}" for q, s in distinct])
    return matches[0]


def get_inheritance_chain(
    index: StructuralIndex, class_name: str, direction: str = "both"
) -> dict:
    """Breadth-first ancestor and descendant levels for a class. Each
    level is a sorted list of symbol ids; level 0 is omitted (the class
    itself is reported separately)."""
    if direction not in ("bases", "derived", "both"):
        raise BadRequest(f"bad direction {direction!r}")
    try:
        record = find_class(index, class_name)
    except NotFound as exc:
        raise UnknownClass(str(exc)) from exc

    up: dict[int, set[int]] = {}
    down: dict[int, set[int]] = {}
    for edge in index.edges:
        if edge.kind is not EdgeKind.INHERITS_FROM:
            continue
        up.setdefault(edge.src, set()).add(edge.dst)
        down.setdefault(edge.dst, set()).add(edge.src)

    def levels(adj: dict[int, set[int]]) -> list[list[int]]:
        seen = {record.symbol_id}
        frontier = {record.symbol_id}
        out: list[list[int]] = []
        while frontier:
            nxt: set[int] = set()
            for node in frontier:
                nxt |= adj.get(node, set()) - seen
            if not nxt:
                break
            seen |= nxt
            out.append(sorted(nxt))
            frontier = nxt
        return out

    result: dict = {
        "class": record.qualified_name,
        "symbol_id": record.symbol_id,
    }
    if direction in ("bases", "both"):
        result["bases"] = levels(up)
    if direction in ("derived", "both"):
        result["derived"] = levels(down)
    return result


def get_function_calls(
    index: StructuralIndex,
    name: str,
    signature: str | None = None,
    direction: str = "out",
) -> dict:
    """Call sites out of (or into) one function. The function must
    resolve uniquely; pass a signature to pick one overload."""
    if direction not in ("out", "in"):
        raise BadRequest(f"bad direction {direction!r}")
    record = _single_function(index, name, signature)
    same = {
        i
        for i in index.by_qualified.get(record.qualified_name, [])
        if index.symbols[i].signature == record.signature
        and index.symbols[i].kind in FUNCTION_KINDS
    }
    sites = []
    for cs in index.call_sites:
        anchor = cs.caller if direction == "out" else cs.callee
        if anchor not in same:
            continue
        other_id = cs.callee if direction == "out" else cs.caller
        other = index.symbols[other_id]
        sites.append(
            {
                "caller": cs.caller,
                "callee": cs.callee,
                "other": other.qualified_name,
                "resolved": not other.is_synthetic,
                "file": cs.location.file,
                "line": cs.location.start_line,
            }
        )
    return {
        "function": record.qualified_name,
        "symbol_id": record.symbol_id,
        "direction": direction,
        "sites": sites,
    }


def resolve_seed(index: StructuralIndex, seed: str | int) -> list[int]:
    """Symbol ids a defect seed refers to. Bare names fan out to every
    record with that name; qualified names match exactly or, failing
    that, as a trailing scope path ("Calculator::add" finds
    "calc::Calculator::add"). Unknown seeds resolve to nothing."""
    if isinstance(seed, int) or (isinstance(seed, str) and seed.isdigit()):
        sid = int(seed)
        if 0 <= sid < len(index.symbols):
            return [sid]
        return []
    if "::" in seed:
        ids = list(index.by_qualified.get(seed, []))
        if ids:
            return ids
        suffix = "::" + seed
        return sorted(
            i
            for name, pool in index.by_qualified.items()
            if name.endswith(suffix)
            for i in pool
        )
    return list(index.by_name.get(seed, []))


def defect_subgraph(
    index: StructuralIndex, seeds: list[str | int], hops: int = 2
) -> dict:
    """Undirected neighborhood around resolved seeds, following
    containment, inheritance, call and override edges up to ``hops``
    steps. Seeds that resolve to nothing are dropped; if every seed
    drops, raises ``NoSeedsResolved``."""
    if hops < 0:
        raise BadRequest("hops must be >= 0")
    seed_ids: set[int] = set()
    for seed in seeds:
        seed_ids.update(resolve_seed(index, seed))
    if not seed_ids:
        raise NoSeedsResolved(f"none of {list(seeds)!r} resolved")

    adj: dict[int, set[int]] = {}
    for edge in index.edges:
        if edge.kind not in _SUBGRAPH_KINDS:
            continue
        adj.setdefault(edge.src, set()).add(edge.dst)
        adj.setdefault(edge.dst, set()).add(edge.src)

    nodes = set(seed_ids)
    frontier = set(seed_ids)
    for _ in range(hops):
        nxt: set[int] = set()
        for node in frontier:
            nxt |= adj.get(node, set()) - nodes
        if not nxt:
            break
        nodes |= nxt
        frontier = nxt

    edges = [
        e
        for e in index.edges
        if e.kind in _SUBGRAPH_KINDS and e.src in nodes and e.dst in nodes
    ]
    return {
        "seeds": sorted(seed_ids),
        "hops": hops,
        "nodes": sorted(nodes),
        "edges": [e.to_dict() for e in edges],
    }


def grep_baseline(
    index: StructuralIndex,
    pattern: str,
    max_results: int = 50,
    regex: bool = True,
) -> dict:
    """Line matches of a pattern across all indexed sources, ordered by
    path then line, truncated at ``max_results``."""
    if max_results < 1:
        raise BadRequest("max_results must be >= 1")
    if regex:
        try:
            rx = re.compile(pattern)
        except re.error as exc:
            raise BadRequest(f"invalid pattern: {exc}") from exc
        hit = rx.search
    else:
        hit = lambda line: pattern in line  # noqa: E731
    matches = []
    truncated = False
    for path in sorted(index.sources):
        for lineno, line in enumerate(index.sources[path].split("\n"), start=1):
            if not hit(line):
                continue
            if len(matches) >= max_results:
                truncated = True
                break
            matches.append({"path": path, "line": lineno, "text": line})
        if truncated:
            break
    return {"pattern": pattern, "matches": matches, "truncated": truncated}
