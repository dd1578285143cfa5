"""Exception types shared across the engine.

Every error that can cross the tool-protocol boundary derives from
``EngineError``; its class name doubles as the wire ``error_kind``.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for engine failures."""

    @property
    def kind(self) -> str:
        return type(self).__name__


class RootNotFound(EngineError):
    """Repository root does not exist or is not a directory."""


class MalformedDiff(EngineError):
    """Unified diff text could not be parsed."""


class ContextMismatch(EngineError):
    """Diff context lines disagree with the file content they target."""


class FileMissing(EngineError):
    """Diff targets a path that is not present in the repository."""


class RunnerUnavailable(EngineError):
    """Scratch root is missing or not writable."""


class MaterializationFailed(EngineError):
    """Repository snapshot could not be written to the scratch directory."""


class CorruptIndex(EngineError):
    """Index container is unreadable or fails the magic-header check."""


class VersionMismatch(EngineError):
    """Index container was written by an incompatible format version."""


class NotFound(EngineError):
    """Query name does not lex as an identifier or qualified name."""


class ScopeNotFound(EngineError):
    """Function query names a scope that matches no known symbol."""


class AmbiguousName(EngineError):
    """Name resolves to more than one candidate where one is required."""

    def __init__(self, message: str, candidates: list[str] | None = None):
        super().__init__(message)
        self.candidates = candidates or []


class UnknownClass(EngineError):
    """Inheritance query names a class with no definition in the index."""


class UnknownFunction(EngineError):
    """Call query resolves to no function record."""


class NoSeedsResolved(EngineError):
    """None of the requested seed names match an indexed symbol."""


class UnknownArtifact(EngineError):
    """Intent summary requested for an id that is not in the index."""


class ProviderUnavailable(EngineError):
    """External embedding endpoint failed or produced garbage."""


class SnapshotMismatch(EngineError):
    """Intent index was built against a different repository snapshot."""


class EmptyIndex(EngineError):
    """Intent query issued against an index with no documents."""


class ReproductionFailed(EngineError):
    """Issue could not be reproduced as a failing test."""

    def __init__(self, message: str, reason: str = ""):
        super().__init__(message)
        self.reason = reason or message


class GenerationFailed(EngineError):
    """Generation stage ended with no applicable candidate patches."""


class BackendError(EngineError):
    """Agent backend transcript is malformed or otherwise unusable."""


class JudgeError(EngineError):
    """Judge backend could not produce a score."""


class UnknownTool(EngineError):
    """Tool request names a tool outside the registry."""


class BadRequest(EngineError):
    """Tool request line could not be parsed."""


class IdMismatch(EngineError):
    """Evaluation inputs have misaligned instance ids."""


class StaleIndexWarning(UserWarning):
    """Loaded index was built from a different repository snapshot."""
