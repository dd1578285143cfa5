"""Immutable snapshot of a C++ repository plus issue descriptions.

A ``Repository`` is a value: applying a patch produces a new instance and the
``snapshot_id`` changes exactly when some unit's content does. Loading walks
the root with include globs, skips unreadable files with a warning, and never
requires a build environment.
"""

from __future__ import annotations

import hashlib
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path, PurePosixPath

from .errors import RootNotFound

log = logging.getLogger(__name__)

HEADER_EXTS = {".h", ".hpp", ".hh", ".hxx", ".inl"}
SOURCE_EXTS = {".cpp", ".cc", ".cxx", ".c", ".cu"}

DEFAULT_INCLUDE_GLOBS = (
    "**/*.h",
    "**/*.hpp",
    "**/*.hh",
    "**/*.hxx",
    "**/*.inl",
    "**/*.cpp",
    "**/*.cc",
    "**/*.cxx",
)

QUALIFIED_NAME_RE = re.compile(r"[A-Za-z_]\w*(?:::[A-Za-z_]\w*)*")
_BACKTICK_RE = re.compile(r"`([^`\n]+)`")


def unit_kind(path: str) -> str:
    suffix = PurePosixPath(path).suffix.lower()
    if suffix in HEADER_EXTS:
        return "header"
    if suffix in SOURCE_EXTS:
        return "source"
    return "other"


def content_digest(content: str) -> str:
    return hashlib.sha256(content.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class SourceUnit:
    """One file of the snapshot; ``path`` is root-relative and POSIX-style."""

    path: str
    content: str
    content_hash: str
    kind: str

    @staticmethod
    def make(path: str, content: str) -> "SourceUnit":
        return SourceUnit(path, content, content_digest(content), unit_kind(path))

    @property
    def lines(self) -> list[str]:
        return self.content.split("\n")


def _snapshot_id(units: tuple[SourceUnit, ...]) -> str:
    h = hashlib.sha256()
    for u in sorted(units, key=lambda u: u.path):
        h.update(u.path.encode("utf-8"))
        h.update(b"\x00")
        h.update(u.content_hash.encode("ascii"))
        h.update(b"\n")
    return h.hexdigest()


@dataclass(frozen=True)
class Repository:
    """Sorted, deduplicated collection of source units."""

    root: str
    units: tuple[SourceUnit, ...]
    snapshot_id: str = ""

    def __post_init__(self):
        paths = [u.path for u in self.units]
        if len(set(paths)) != len(paths):
            raise ValueError("duplicate unit paths in repository")
        ordered = tuple(sorted(self.units, key=lambda u: u.path))
        object.__setattr__(self, "units", ordered)
        object.__setattr__(self, "snapshot_id", _snapshot_id(ordered))

    def unit(self, path: str) -> SourceUnit | None:
        for u in self.units:
            if u.path == path:
                return u
        return None

    def paths(self) -> list[str]:
        return [u.path for u in self.units]

    def with_units(self, units: dict[str, str | None]) -> "Repository":
        """Return a new snapshot with ``units`` applied on top: a string value
        replaces or creates a unit, ``None`` deletes it."""
        keep = {u.path: u for u in self.units}
        for path, content in units.items():
            if content is None:
                keep.pop(path, None)
            else:
                keep[path] = SourceUnit.make(path, content)
        return Repository(self.root, tuple(keep.values()))


def load_repository(
    root: str | Path, include_globs: tuple[str, ...] | None = None
) -> Repository:
    """Read every file under ``root`` matched by the include globs.

    Unreadable or non-UTF-8 files are skipped with a warning; an empty match
    set still yields a valid (empty) repository.
    """
    root_path = Path(root)
    if not root_path.is_dir():
        raise RootNotFound(f"repository root not found: {root}")
    globs = include_globs or DEFAULT_INCLUDE_GLOBS
    matched: set[Path] = set()
    for pattern in globs:
        matched.update(p for p in root_path.glob(pattern) if p.is_file())
    units = []
    for p in sorted(matched):
        rel = p.relative_to(root_path).as_posix()
        try:
            content = p.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            log.warning("skipping unreadable unit %s: %s", rel, exc)
            continue
        units.append(SourceUnit.make(rel, content))
    return Repository(str(root_path), tuple(units))


def extract_mentioned_symbols(text: str, keywords: frozenset[str]) -> tuple[str, ...]:
    """Pull identifier-shaped tokens out of free text.

    Backtick-quoted spans are trusted as code: any call arguments are
    stripped and the remainder is kept if it lexes as an identifier or
    qualified name. Unquoted tokens must additionally look like code, not
    prose: qualified, snake_case, camelCase, or written with call parens.
    C++ keywords never qualify.
    """
    seen: dict[str, None] = {}

    def keep(tok: str):
        if tok and tok not in seen:
            if all(seg not in keywords for seg in tok.split("::")):
                seen[tok] = None

    for m in _BACKTICK_RE.finditer(text):
        span = m.group(1).strip()
        if "(" in span:
            span = span.split("(", 1)[0].strip()
        if QUALIFIED_NAME_RE.fullmatch(span):
            keep(span)
    for m in QUALIFIED_NAME_RE.finditer(text):
        tok = m.group(0)
        tail = text[m.end() : m.end() + 1]
        code_like = (
            "::" in tok
            or "_" in tok
            or re.search(r"[a-z][A-Z]", tok) is not None
            or tail == "("
        )
        if code_like:
            keep(tok)
    return tuple(seen)


@dataclass(frozen=True)
class IssueDescription:
    """Natural-language defect report with extracted symbol mentions."""

    title: str
    body: str
    mentioned_symbols: tuple[str, ...] = field(default=())

    @staticmethod
    def from_text(title: str, body: str) -> "IssueDescription":
        from .cxx.lexer import CPP_KEYWORDS

        mentioned = extract_mentioned_symbols(f"{title}\n{body}", CPP_KEYWORDS)
        return IssueDescription(title, body, mentioned)

    @property
    def query_text(self) -> str:
        return f"{self.title}\n{self.body}".strip()
