import json
import math
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cppatlas.errors import EmptyIndex, ProviderUnavailable, SnapshotMismatch
from cppatlas.intent import (
    CommandEmbeddingProvider,
    HashEmbeddingProvider,
    IntentIndex,
    build_intent_index,
    localize,
    query_code_intent,
    split_identifier,
    tokenize,
)
from cppatlas.repo import IssueDescription


class TestTokenizer:
    def test_snake_case_split(self):
        assert split_identifier("last_result_") == ["last", "result"]

    def test_camel_case_split(self):
        assert split_identifier("computeTotalSum") == [
            "compute",
            "total",
            "sum",
        ]

    def test_acronym_boundary(self):
        assert split_identifier("parseHTTPHeader") == [
            "parse",
            "http",
            "header",
        ]

    def test_digits_kept_separate(self):
        assert split_identifier("sha256sum") == ["sha", "256", "sum"]

    def test_tokenize_qualified_text(self):
        assert tokenize("calc::Calculator::add(int, int)") == [
            "calc",
            "calculator",
            "add",
            "int",
            "int",
        ]


class TestHashProvider:
    def test_deterministic_unit_vectors(self):
        provider = HashEmbeddingProvider()
        a = provider.embed("subtract two numbers")
        b = provider.embed("subtract two numbers")
        assert a == b
        assert len(a) == 256
        assert math.isclose(float(np.linalg.norm(a)), 1.0, abs_tol=1e-9)

    def test_empty_text_is_zero_vector(self):
        provider = HashEmbeddingProvider(dim=16)
        assert set(provider.embed("")) == {0.0}

    @settings(max_examples=50, deadline=None)
    @given(st.text(max_size=40))
    def test_never_exceeds_unit_norm(self, text):
        vec = HashEmbeddingProvider(dim=32).embed(text)
        assert float(np.linalg.norm(vec)) <= 1.0 + 1e-9

    def test_name_encodes_dimension(self):
        assert HashEmbeddingProvider(dim=64).name == "hash-tf-64"


class TestCommandProvider:
    def _provider(self, script: str, dim: int = 4) -> CommandEmbeddingProvider:
        return CommandEmbeddingProvider(
            (sys.executable, "-c", script), name="scripted", dim=dim
        )

    def test_round_trip_and_renormalization(self):
        script = (
            "import json,sys;"
            "texts=json.load(sys.stdin)['texts'];"
            "print(json.dumps({'vectors': [[2.0,0.0,0.0,0.0] for _ in texts]}))"
        )
        provider = self._provider(script)
        vec = provider.embed("anything")
        assert vec == (1.0, 0.0, 0.0, 0.0)

    def test_failure_surfaces_as_provider_unavailable(self):
        bad_exit = self._provider("import sys;sys.exit(9)")
        with pytest.raises(ProviderUnavailable):
            bad_exit.embed("x")
        bad_shape = self._provider(
            "import json,sys;json.load(sys.stdin);"
            "print(json.dumps({'vectors': [[1.0]]}))"
        )
        with pytest.raises(ProviderUnavailable):
            bad_shape.embed("x")
        missing = CommandEmbeddingProvider(
            ("/no/such/embedder",), name="gone", dim=4
        )
        with pytest.raises(ProviderUnavailable):
            missing.embed("x")


class TestIntentIndex:
    def test_one_doc_per_real_symbol(self, toy_index, toy_intent):
        real = [r for r in toy_index.symbols if not r.is_synthetic]
        assert len(toy_intent.docs) == len(real)
        assert [d.symbol_id for d in toy_intent.docs] == [
            r.symbol_id for r in real
        ]

    def test_dict_round_trip(self, toy_intent):
        clone = IntentIndex.from_dict(toy_intent.to_dict())
        assert clone.to_dict() == toy_intent.to_dict()

    def test_query_ranks_relevant_symbol_first(self, toy_intent):
        hits = query_code_intent(
            toy_intent, "subtract difference wrong result", k=5
        )
        assert hits[0]["qualified_name"].startswith("calc::Calculator")
        assert any(
            "subtract" in h["qualified_name"] for h in hits[:3]
        )

    def test_scores_descend_with_deterministic_ties(self, toy_intent):
        hits = query_code_intent(toy_intent, "calculator", k=50)
        scores = [h["score"] for h in hits]
        assert scores == sorted(scores, reverse=True)
        for a, b in zip(hits, hits[1:]):
            if a["score"] == b["score"]:
                assert (a["qualified_name"], a["symbol_id"]) < (
                    b["qualified_name"],
                    b["symbol_id"],
                )

    def test_k_bounds_results(self, toy_intent):
        assert len(query_code_intent(toy_intent, "calc", k=3)) == 3

    def test_provider_name_must_match(self, toy_intent):
        with pytest.raises(ProviderUnavailable):
            query_code_intent(
                toy_intent, "calc", provider=HashEmbeddingProvider(dim=64)
            )

    def test_empty_index_rejected(self, toy_index):
        empty = IntentIndex(
            provider_name="hash-tf-256",
            dim=256,
            repo_snapshot=toy_index.repo_snapshot,
            docs=(),
        )
        with pytest.raises(EmptyIndex):
            query_code_intent(empty, "anything")


class TestLocalize:
    def issue(self, title, body=""):
        return IssueDescription.from_text(title, body)

    def test_intersection_mode(self, toy_index, toy_intent):
        got = localize(
            toy_index,
            toy_intent,
            self.issue(
                "subtract returns the wrong result",
                "`Calculator::subtract` adds instead of subtracting",
            ),
        )
        assert got["mode"] == "intersection"
        assert got["candidates"][0]["qualified_name"] == (
            "calc::Calculator::subtract"
        )
        assert got["subgraph_nodes"]

    def test_intent_only_fallback_without_mentions(
        self, toy_index, toy_intent
    ):
        got = localize(
            toy_index,
            toy_intent,
            self.issue("something about subtraction results"),
        )
        assert got["mode"] == "intent_only"
        assert got["candidates"]

    def test_snapshot_mismatch_detected(self, toy_index, toy_intent):
        stale = IntentIndex(
            provider_name=toy_intent.provider_name,
            dim=toy_intent.dim,
            repo_snapshot="f" * 64,
            docs=toy_intent.docs,
        )
        with pytest.raises(SnapshotMismatch):
            localize(toy_index, stale, self.issue("anything"))


class TestRetrievalOracle:
    """Top-k must agree with an exhaustive cosine scan."""

    def brute_force(self, intent, text, k):
        # same float64 matrix product as the query path, so exact ties
        # break identically; the scan checks ranking, slicing and packaging
        provider = HashEmbeddingProvider()
        q = np.asarray(provider.embed(text), dtype=np.float64)
        matrix = np.asarray([d.vector for d in intent.docs], dtype=np.float64)
        scores = matrix @ q
        scored = [
            (-float(s), d.qualified_name, d.symbol_id)
            for d, s in zip(intent.docs, scores)
        ]
        scored.sort()
        return [
            {"symbol_id": sid, "qualified_name": name, "score": -neg}
            for neg, name, sid in scored[:k]
        ]

    def test_agrees_with_exhaustive_scan(self, toy_intent):
        queries = [
            "subtract numbers",
            "scientific calculator power",
            "clamp a value between bounds",
            "flavor string",
            "constructor initial value",
        ]
        for k in (1, 3, 10):
            for text in queries:
                got = query_code_intent(toy_intent, text, k=k)
                want = self.brute_force(toy_intent, text, k)
                assert [
                    (g["symbol_id"], round(g["score"], 12)) for g in got
                ] == [(w["symbol_id"], round(w["score"], 12)) for w in want]

    def test_self_query_scores_one(self, toy_intent):
        doc = max(toy_intent.docs, key=lambda d: len(d.text))
        hits = query_code_intent(toy_intent, doc.text, k=len(toy_intent.docs))
        mine = next(h for h in hits if h["symbol_id"] == doc.symbol_id)
        assert abs(mine["score"] - 1.0) <= 1e-6


def test_command_provider_through_index_build(toy_index):
    # an external embedder that just hashes like the built-in one
    script = (
        "import json,sys,hashlib;"
        "data=json.load(sys.stdin);"
        "import re\n"
        "def tok(t):\n"
        "    return [w.lower() for w in re.findall("
        "r'[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|[0-9]+', t)]\n"
        "def emb(t):\n"
        "    v=[0.0]*8\n"
        "    for w in tok(t):\n"
        "        v[int(hashlib.sha1(w.encode()).hexdigest(),16)%8]+=1\n"
        "    return v\n"
        "print(json.dumps({'vectors':[emb(t) for t in data['texts']]}))"
    )
    provider = CommandEmbeddingProvider(
        (sys.executable, "-c", script), name="mini-hash-8", dim=8
    )
    intent = build_intent_index(toy_index, provider)
    assert intent.provider_name == "mini-hash-8"
    assert intent.dim == 8
    hits = query_code_intent(intent, "subtract", k=3, provider=provider)
    assert hits
