"""Generator-truth check: index random corpora and compare every extracted
fact against the model the generator computed for itself."""

from __future__ import annotations

import pathlib

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from cppatlas.index import build_index
from cppatlas.model import UNRESOLVED_PREFIX, EdgeKind
from cppatlas.repo import load_repository

import corpusgen


def _materialize(tmp_path: pathlib.Path, corpus: corpusgen.Corpus) -> pathlib.Path:
    for rel, content in corpus.files.items():
        target = tmp_path / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(content)
    return tmp_path


def _index_for(tmp_path, corpus):
    root = _materialize(tmp_path, corpus)
    return build_index(load_repository(str(root)))


def _actual_symbol_shapes(index) -> list[tuple]:
    out = []
    for rec in index.symbols:
        if rec.is_synthetic:
            continue
        if rec.qualified_name.startswith(UNRESOLVED_PREFIX):
            continue
        out.append(
            (
                rec.kind.value,
                rec.qualified_name,
                rec.signature,
                rec.is_definition,
                rec.doc_comment,
                rec.location.file,
                rec.location.start_line,
                rec.location.end_line,
                rec.is_virtual,
                rec.has_override,
            )
        )
    return sorted(out)


def _callee_key(rec) -> tuple:
    return (rec.kind.value, rec.qualified_name, rec.signature, rec.is_definition)


def _actual_calls(index) -> list[tuple]:
    out = []
    for site in index.call_sites:
        caller = index.symbols[site.caller]
        callee = index.symbols[site.callee]
        out.append(
            (
                caller.qualified_name,
                caller.signature,
                _callee_key(callee),
                site.location.file,
                site.location.start_line,
            )
        )
    return sorted(out)


def _actual_inherits(index) -> set[tuple]:
    out = set()
    for edge in index.edges:
        if edge.kind is EdgeKind.INHERITS_FROM:
            out.add(
                (
                    index.symbols[edge.src].qualified_name,
                    index.symbols[edge.dst].qualified_name,
                )
            )
    return out


def _func_key(rec) -> tuple:
    return (
        rec.qualified_name,
        rec.signature,
        rec.is_definition,
        rec.location.file,
        rec.location.start_line,
    )


def _actual_overload_pairs(index) -> set[frozenset]:
    out = set()
    for edge in index.edges:
        if edge.kind is EdgeKind.OVERLOAD_OF:
            out.add(
                frozenset(
                    {
                        _func_key(index.symbols[edge.src]),
                        _func_key(index.symbols[edge.dst]),
                    }
                )
            )
    return out


def _actual_overrides(index) -> set[tuple]:
    out = set()
    for edge in index.edges:
        if edge.kind is EdgeKind.OVERRIDES:
            src = index.symbols[edge.src]
            dst = index.symbols[edge.dst]
            out.add(
                ((src.qualified_name, src.signature),
                 (dst.qualified_name, dst.signature))
            )
    return out


def _actual_contains(index) -> set[tuple]:
    out = set()
    for edge in index.edges:
        if edge.kind is not EdgeKind.CONTAINS:
            continue
        child = index.symbols[edge.dst]
        if child.is_synthetic or child.qualified_name.startswith(UNRESOLVED_PREFIX):
            continue
        parent = index.symbols[edge.src]
        if parent.is_synthetic:
            parent_key = ("<root>", parent.location.file)
        else:
            parent_key = (
                parent.qualified_name,
                parent.location.file,
                parent.location.start_line,
            )
        child_key = (
            child.qualified_name,
            child.signature,
            child.is_definition,
            child.location.file,
            child.location.start_line,
        )
        out.add((parent_key, child_key))
    return out


def _compare(corpus, index):
    assert _actual_symbol_shapes(index) == corpusgen.expected_symbol_shapes(corpus)
    assert _actual_contains(index) == corpusgen.expected_contains(corpus)
    assert _actual_calls(index) == corpusgen.expected_calls(corpus)
    assert _actual_inherits(index) == corpusgen.expected_inherits(corpus)
    assert _actual_overload_pairs(index) == corpusgen.expected_overload_pairs(corpus)
    assert _actual_overrides(index) == corpusgen.expected_overrides(corpus)


@pytest.mark.parametrize("seed", range(20))
def test_generated_corpus_matches_expected_model(seed, tmp_path):
    corpus = corpusgen.generate(seed)
    index = _index_for(tmp_path, corpus)
    _compare(corpus, index)


@settings(
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.function_scoped_fixture],
)
@given(seed=st.integers(min_value=0, max_value=10_000_000))
def test_generated_corpus_matches_expected_model_fuzz(seed, tmp_path):
    # tmp_path is shared across examples; keep each corpus isolated
    corpus = corpusgen.generate(seed)
    index = _index_for(tmp_path / f"s{seed}", corpus)
    _compare(corpus, index)


@pytest.mark.parametrize("seed", [3, 17])
def test_every_call_site_round_trips(seed, tmp_path):
    """Every raw call the generator emitted shows up exactly once."""
    corpus = corpusgen.generate(seed)
    index = _index_for(tmp_path, corpus)
    assert len(index.call_sites) == len(corpus.raw_calls)
