"""Full pipeline run over the bundled toy repository.

The toy defect: Calculator::subtract stores the difference but returns
the sum. Scripted backends stand in for a live model; one emits the
reproducing test, the other proposes three candidate patches (a
cosmetic twin of the fix, a regression-causing edit, and the fix).
"""

from __future__ import annotations

import argparse
import json
import pathlib
import sys

from cppatlas.backends import ScriptedBackend
from cppatlas.diffs import make_diff
from cppatlas.index import build_index
from cppatlas.intent import build_intent_index
from cppatlas.pipeline import run_pipeline
from cppatlas.repo import IssueDescription, load_repository
from cppatlas.runner import TestCase

DEFAULT_ROOT = (
    pathlib.Path(__file__).resolve().parents[1] / "tests" / "data" / "toyrepo"
)

FIX_OLD = "last_result_ = a - b;\n    return a + b;"
FIX_NEW = "last_result_ = a - b;\n    return a - b;"


def content_test(test_id: str, needle: str) -> TestCase:
    code = (
        "import pathlib, sys; "
        "text = pathlib.Path('src/calc.cpp').read_text(); "
        f"sys.exit(0 if {needle!r} in text else 1)"
    )
    return TestCase(test_id=test_id, command=(sys.executable, "-c", code))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--root", default=str(DEFAULT_ROOT))
    parser.add_argument("--strategy", default="vote",
                        choices=["vote", "min_complexity"])
    args = parser.parse_args(argv)

    repo = load_repository(args.root)
    structural = build_index(repo)
    intent = build_intent_index(structural)

    issue = IssueDescription.from_text(
        "Calculator::subtract returns the sum",
        "Calling `Calculator::subtract` adds its arguments instead of "
        "subtracting them.",
    )

    old = repo.unit("src/calc.cpp").content
    fix = make_diff(old, old.replace(FIX_OLD, FIX_NEW), "src/calc.cpp")
    twin = make_diff(
        old,
        old.replace(FIX_OLD, FIX_NEW).replace(
            "int Calculator::subtract",
            "// fixed\nint Calculator::subtract",
        ),
        "src/calc.cpp",
    )
    breaker = make_diff(
        old, old.replace('return "basic";', 'return "fancy";'), "src/calc.cpp"
    )

    repro_backend = ScriptedBackend([{
        "turn": "emit",
        "kind": "test",
        "test": content_test("t-subtract-fixed", "return a - b;").to_dict(),
    }])
    gen_backend = ScriptedBackend([
        {"turn": "emit", "kind": "patch", "diff": diff}
        for diff in (twin, breaker, fix)
    ])

    result = run_pipeline(
        repo,
        issue,
        repro_backend,
        gen_backend,
        regression_tests=[content_test("t-flavor", 'return "basic";')],
        structural=structural,
        intent=intent,
    )
    print(json.dumps(result.to_dict(), indent=2, sort_keys=True))
    return 0 if result.status == "SUCCESS" else 1


if __name__ == "__main__":
    sys.exit(main())
