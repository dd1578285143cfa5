"""Tool registry shared by the stdio server and the pipeline loops.

Each tool takes a JSON-compatible argument object and returns a
JSON-compatible result. Argument validation errors raise ``BadRequest``;
domain failures raise their specific ``EngineError`` subclass, and the
caller decides how to surface the ``kind``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BadRequest, UnknownTool
from .index import StructuralIndex
from .intent import HashEmbeddingProvider, IntentIndex, query_code_intent
from .queries import (
    defect_subgraph,
    find_class,
    find_function,
    get_function_calls,
    get_inheritance_chain,
    grep_baseline,
    snippet_for,
)


@dataclass
class ToolContext:
    structural: StructuralIndex
    intent: IntentIndex | None = None
    provider: object | None = None

    def __post_init__(self):
        if self.provider is None:
            self.provider = HashEmbeddingProvider()


def _require(args: dict, key: str, typ=str):
    if key not in args:
        raise BadRequest(f"missing argument {key!r}")
    value = args[key]
    if typ is int and isinstance(value, bool):
        raise BadRequest(f"argument {key!r} must be {typ.__name__}")
    if not isinstance(value, typ):
        raise BadRequest(f"argument {key!r} must be {typ.__name__}")
    return value


def _optional(args: dict, key: str, typ, default):
    if key not in args or args[key] is None:
        return default
    value = args[key]
    if typ is int and isinstance(value, bool):
        raise BadRequest(f"argument {key!r} must be {typ.__name__}")
    if not isinstance(value, typ):
        raise BadRequest(f"argument {key!r} must be {typ.__name__}")
    return value


def _tool_find_class(ctx: ToolContext, args: dict) -> dict:
    record = find_class(ctx.structural, _require(args, "name"))
    return {
        "record": record.to_dict(),
        "snippet": snippet_for(ctx.structural, record),
    }


def _tool_find_function(ctx: ToolContext, args: dict) -> dict:
    records = find_function(
        ctx.structural,
        _require(args, "name"),
        _optional(args, "signature", str, None),
    )
    return {
        "matches": [
            {
                "record": r.to_dict(),
                "snippet": snippet_for(ctx.structural, r),
            }
            for r in records
        ]
    }


def _tool_inheritance(ctx: ToolContext, args: dict) -> dict:
    return get_inheritance_chain(
        ctx.structural,
        _require(args, "name"),
        _optional(args, "direction", str, "both"),
    )


def _tool_calls(ctx: ToolContext, args: dict) -> dict:
    return get_function_calls(
        ctx.structural,
        _require(args, "name"),
        _optional(args, "signature", str, None),
        _optional(args, "direction", str, "out"),
    )


def _tool_intent(ctx: ToolContext, args: dict) -> dict:
    if ctx.intent is None:
        raise BadRequest("no intent index is loaded")
    hits = query_code_intent(
        ctx.intent,
        _require(args, "text"),
        k=_optional(args, "k", int, 10),
        provider=ctx.provider,
    )
    return {"hits": hits}


def _tool_grep(ctx: ToolContext, args: dict) -> dict:
    return grep_baseline(
        ctx.structural,
        _require(args, "pattern"),
        max_results=_optional(args, "max_results", int, 50),
        regex=_optional(args, "regex", bool, True),
    )


def _tool_subgraph(ctx: ToolContext, args: dict) -> dict:
    seeds = _require(args, "seeds", list)
    for seed in seeds:
        if not isinstance(seed, (str, int)) or isinstance(seed, bool):
            raise BadRequest("seeds must be names or symbol ids")
    return defect_subgraph(
        ctx.structural, seeds, hops=_optional(args, "hops", int, 2)
    )


TOOL_REGISTRY = {
    "FindClass": _tool_find_class,
    "FindFunction": _tool_find_function,
    "GetInheritanceChain": _tool_inheritance,
    "GetFunctionCalls": _tool_calls,
    "QueryCodeIntent": _tool_intent,
    "GrepBaseline": _tool_grep,
    "DefectSubgraph": _tool_subgraph,
}


def dispatch_tool(ctx: ToolContext, tool: str, arguments: dict) -> dict:
    handler = TOOL_REGISTRY.get(tool)
    if handler is None:
        raise UnknownTool(f"no tool named {tool!r}")
    if not isinstance(arguments, dict):
        raise BadRequest("arguments must be an object")
    return handler(ctx, arguments)
