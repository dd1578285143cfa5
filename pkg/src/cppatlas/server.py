"""Line-oriented stdio tool server.

One JSON request per line in, one JSON response per line out. A request
looks like ``{"request_id": 1, "tool": "FindClass", "arguments":
{"name": "Search"}}``. Responses echo ``request_id`` and carry either
``"ok": true`` with a result or ``"ok": false`` with an ``error_kind``
matching the engine exception name. Malformed lines produce a
``BadRequest`` response; the loop never exits on bad input, only on EOF.
"""

from __future__ import annotations

import json
import sys

from .errors import AmbiguousName, BadRequest, EngineError
from .tools import ToolContext, dispatch_tool


def _encode(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def _error_response(request_id, exc: EngineError) -> dict:
    payload = {
        "request_id": request_id,
        "ok": False,
        "error_kind": exc.kind,
        "message": str(exc),
    }
    if isinstance(exc, AmbiguousName):
        payload["candidates"] = list(exc.candidates)
    return payload


def handle_request(ctx: ToolContext, request: dict) -> dict:
    request_id = request.get("request_id")
    tool = request.get("tool")
    arguments = request.get("arguments", {})
    try:
        if not isinstance(tool, str):
            raise BadRequest("request needs a string 'tool' field")
        if not isinstance(arguments, dict):
            raise BadRequest("'arguments' must be an object")
        result = dispatch_tool(ctx, tool, arguments)
        return {"request_id": request_id, "ok": True, "result": result}
    except EngineError as exc:
        return _error_response(request_id, exc)


def handle_line(ctx: ToolContext, line: str) -> str:
    try:
        request = json.loads(line)
    except ValueError as exc:
        return _encode(
            _error_response(None, BadRequest(f"not valid JSON: {exc}"))
        )
    if not isinstance(request, dict):
        return _encode(
            _error_response(None, BadRequest("request must be a JSON object"))
        )
    return _encode(handle_request(ctx, request))


def serve(ctx: ToolContext, stdin=None, stdout=None) -> int:
    """Serve until EOF. Returns the number of requests handled."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    handled = 0
    for raw in stdin:
        line = raw.strip()
        if not line:
            continue
        stdout.write(handle_line(ctx, line) + "\n")
        stdout.flush()
        handled += 1
    return handled
