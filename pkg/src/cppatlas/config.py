"""Application configuration loaded from a JSON file.

Unknown keys are rejected rather than ignored, so a typo in a config
file fails loudly instead of silently falling back to defaults.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .pipeline import PipelineConfig
from .repo import DEFAULT_INCLUDE_GLOBS
from .runner import RunnerConfig


def _check_keys(data: dict, allowed: set[str], where: str):
    unknown = set(data) - allowed
    if unknown:
        raise ValueError(f"unknown {where} keys: {sorted(unknown)}")


@dataclass(frozen=True)
class ProviderConfig:
    type: str = "hash"  # "hash" or "command"
    dim: int = 256
    command: tuple[str, ...] = ()
    name: str = ""

    def make(self):
        from .intent import CommandEmbeddingProvider, HashEmbeddingProvider

        if self.type == "hash":
            return HashEmbeddingProvider(dim=self.dim)
        if self.type == "command":
            if not self.command:
                raise ValueError("command provider needs a command")
            return CommandEmbeddingProvider(
                command=self.command,
                name=self.name or "command",
                dim=self.dim,
            )
        raise ValueError(f"unknown provider type {self.type!r}")


@dataclass(frozen=True)
class AppConfig:
    include_globs: tuple[str, ...] = DEFAULT_INCLUDE_GLOBS
    provider: ProviderConfig = field(default_factory=ProviderConfig)
    runner: RunnerConfig = field(default_factory=RunnerConfig)
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)

    @staticmethod
    def load(path: str | Path) -> "AppConfig":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        return AppConfig.from_dict(raw)

    @staticmethod
    def from_dict(raw: dict) -> "AppConfig":
        _check_keys(
            raw, {"include_globs", "provider", "runner", "pipeline"}, "config"
        )
        provider_raw = raw.get("provider", {})
        _check_keys(
            provider_raw, {"type", "dim", "command", "name"}, "provider"
        )
        provider = ProviderConfig(
            type=provider_raw.get("type", "hash"),
            dim=provider_raw.get("dim", 256),
            command=tuple(provider_raw.get("command", ())),
            name=provider_raw.get("name", ""),
        )
        runner_raw = raw.get("runner", {})
        _check_keys(
            runner_raw,
            {"scratch_root", "timeout_seconds", "output_limit_bytes",
             "keep_scratch"},
            "runner",
        )
        runner = RunnerConfig(
            scratch_root=runner_raw.get("scratch_root"),
            timeout_seconds=runner_raw.get("timeout_seconds", 30.0),
            output_limit_bytes=runner_raw.get("output_limit_bytes", 65536),
            keep_scratch=runner_raw.get("keep_scratch", False),
        )
        pipeline_raw = raw.get("pipeline", {})
        _check_keys(
            pipeline_raw,
            {"reproduce_budget", "generate_budget", "candidate_count",
             "intent_k", "subgraph_hops", "vote_weights",
             "selection_strategy"},
            "pipeline",
        )
        weights = pipeline_raw.get("vote_weights", (0.5, 0.25, 0.25))
        if len(weights) != 3:
            raise ValueError("vote_weights must have three entries")
        pipeline = PipelineConfig(
            reproduce_budget=pipeline_raw.get("reproduce_budget", 20),
            generate_budget=pipeline_raw.get("generate_budget", 50),
            candidate_count=pipeline_raw.get("candidate_count", 10),
            intent_k=pipeline_raw.get("intent_k", 10),
            subgraph_hops=pipeline_raw.get("subgraph_hops", 2),
            vote_weights=tuple(float(w) for w in weights),
            selection_strategy=pipeline_raw.get("selection_strategy", "vote"),
            runner=runner,
        )
        return AppConfig(
            include_globs=tuple(raw.get("include_globs", DEFAULT_INCLUDE_GLOBS)),
            provider=provider,
            runner=runner,
            pipeline=pipeline,
        )
