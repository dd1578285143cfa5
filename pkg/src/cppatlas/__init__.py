"""Structural and intent analysis for C++ repositories, with a patch
selection pipeline on top.

The package indexes a source tree without a build environment: a
tolerant parser extracts symbols, containment, inheritance, calls,
overloads and overrides into a deterministic graph, and a hashed
term-frequency embedder turns each symbol into a searchable intent
document. Query layers answer structural and natural-language lookups;
the pipeline reproduces a defect, collects candidate patches from an
agent backend, prunes and validates them, and votes on a winner.
"""

from .backends import HeuristicJudge, ScriptedBackend, ScriptedJudge
from .config import AppConfig, ProviderConfig
from .diffs import (
    PatchCandidate,
    apply_patch,
    make_diff,
    parse_unified_diff,
    reverse_patch,
    touched_old_lines,
)
from .errors import EngineError
from .evaluation import (
    EvalInstance,
    LocalizationReport,
    evaluate_localization,
    predictions_from_localization,
    score_instance,
    truth_sets,
)
from .index import (
    IndexContainer,
    StructuralIndex,
    build_index,
    load_index,
    persist_index,
)
from .intent import (
    CommandEmbeddingProvider,
    HashEmbeddingProvider,
    IntentIndex,
    build_intent_index,
    localize,
    query_code_intent,
)
from .model import (
    CallSite,
    EdgeKind,
    Location,
    StructuralEdge,
    SymbolKind,
    SymbolRecord,
)
from .pipeline import (
    BaselineCache,
    PipelineConfig,
    PipelineResult,
    complexity,
    generate_candidates,
    prune,
    reproduce,
    run_pipeline,
    select,
    validate,
    vote_score,
)
from .queries import (
    defect_subgraph,
    find_class,
    find_function,
    get_function_calls,
    get_inheritance_chain,
    grep_baseline,
)
from .repo import IssueDescription, Repository, SourceUnit, load_repository
from .runner import RunnerConfig, TestCase, TestOutcome, run_test, run_tests
from .server import handle_line, serve
from .tools import TOOL_REGISTRY, ToolContext, dispatch_tool

__version__ = "0.1.0"

__all__ = [
    "AppConfig",
    "BaselineCache",
    "CallSite",
    "CommandEmbeddingProvider",
    "EdgeKind",
    "EngineError",
    "EvalInstance",
    "HashEmbeddingProvider",
    "HeuristicJudge",
    "IndexContainer",
    "IntentIndex",
    "IssueDescription",
    "Location",
    "PatchCandidate",
    "PipelineConfig",
    "PipelineResult",
    "ProviderConfig",
    "Repository",
    "RunnerConfig",
    "ScriptedBackend",
    "ScriptedJudge",
    "SourceUnit",
    "StructuralEdge",
    "StructuralIndex",
    "SymbolKind",
    "SymbolRecord",
    "TOOL_REGISTRY",
    "TestCase",
    "TestOutcome",
    "ToolContext",
    "apply_patch",
    "build_index",
    "build_intent_index",
    "complexity",
    "defect_subgraph",
    "dispatch_tool",
    "evaluate_localization",
    "find_class",
    "find_function",
    "generate_candidates",
    "get_function_calls",
    "get_inheritance_chain",
    "grep_baseline",
    "handle_line",
    "load_index",
    "load_repository",
    "localize",
    "make_diff",
    "parse_unified_diff",
    "persist_index",
    "predictions_from_localization",
    "prune",
    "query_code_intent",
    "reproduce",
    "reverse_patch",
    "run_pipeline",
    "run_test",
    "run_tests",
    "select",
    "serve",
    "touched_old_lines",
    "truth_sets",
    "score_instance",
    "LocalizationReport",
    "validate",
    "vote_score",
]
