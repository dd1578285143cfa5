"""Command line frontend: exit codes, output shapes and the installed
entry point."""

import contextlib
import io
import json
import subprocess
import sys

import pytest

from cppatlas.cli import main
from cppatlas.diffs import make_diff
from cppatlas.index import load_index
from cppatlas.queries import find_class
from cppatlas.repo import load_repository
from cppatlas.runner import TestCase

PY = sys.executable


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture(scope="module")
def index_file(toyrepo_root, tmp_path_factory):
    out = tmp_path_factory.mktemp("idx") / "toy.caidx"
    with contextlib.redirect_stdout(io.StringIO()):
        code = main(["index", "--root", str(toyrepo_root), "--out", str(out)])
    assert code == 0
    return out


class TestIndexCommand:
    def test_reports_counts_and_persists(self, toyrepo_root, toy_index,
                                         tmp_path, capsys):
        out = tmp_path / "toy.caidx"
        code, stdout, _ = run_cli(capsys, "index", "--root", str(toyrepo_root),
                                  "--out", str(out))
        assert code == 0
        payload = json.loads(stdout)
        assert payload["symbols"] == len(toy_index.symbols)
        assert payload["edges"] == len(toy_index.edges)
        assert payload["parse_errors"] == 0
        assert payload["intent_docs"] > 0
        container = load_index(out)
        assert container.structural == toy_index

    def test_no_intent_leaves_docs_out(self, toyrepo_root, tmp_path, capsys):
        out = tmp_path / "bare.caidx"
        code, stdout, _ = run_cli(capsys, "index", "--root", str(toyrepo_root),
                                  "--out", str(out), "--no-intent")
        assert code == 0
        assert json.loads(stdout)["intent_docs"] == 0
        assert load_index(out).intent is None

    def test_missing_root_is_input_error(self, tmp_path, capsys):
        code, _, stderr = run_cli(capsys, "index", "--root",
                                  str(tmp_path / "nope"), "--out",
                                  str(tmp_path / "x.caidx"))
        assert code == 2
        assert json.loads(stderr)["error_kind"] == "RootNotFound"


class TestQueryCommand:
    def test_find_class_from_index_file(self, index_file, toy_index, capsys):
        code, stdout, _ = run_cli(capsys, "query", "--index", str(index_file),
                                  "find-class", "Calculator")
        assert code == 0
        payload = json.loads(stdout)
        expected = find_class(toy_index, "Calculator")
        assert payload["record"] == expected.to_dict()
        assert payload["snippet"].startswith("class Calculator")

    def test_find_class_from_root(self, toyrepo_root, capsys):
        code, stdout, _ = run_cli(capsys, "query", "--root", str(toyrepo_root),
                                  "find-class", "SciCalculator")
        assert code == 0
        record = json.loads(stdout)["record"]
        assert record["qualified_name"] == "calc::SciCalculator"

    def test_unknown_name_exits_two(self, index_file, capsys):
        code, _, stderr = run_cli(capsys, "query", "--index", str(index_file),
                                  "find-class", "Nonesuch")
        assert code == 2
        assert json.loads(stderr)["error_kind"] == "NotFound"

    def test_ambiguous_name_lists_candidates(self, tmp_path, capsys):
        (tmp_path / "twin.h").write_text(
            "namespace x { class Twin {}; }\nnamespace y { class Twin {}; }\n",
            encoding="utf-8",
        )
        code, _, stderr = run_cli(capsys, "query", "--root", str(tmp_path),
                                  "find-class", "Twin")
        assert code == 2
        payload = json.loads(stderr)
        assert payload["error_kind"] == "AmbiguousName"
        assert sorted(payload["candidates"]) == ["x::Twin", "y::Twin"]

    def test_other_query_subcommands(self, index_file, capsys):
        code, stdout, _ = run_cli(capsys, "query", "--index", str(index_file),
                                  "inheritance", "SciCalculator",
                                  "--direction", "bases")
        assert code == 0
        assert json.loads(stdout)["bases"]

        code, stdout, _ = run_cli(capsys, "query", "--index", str(index_file),
                                  "calls", "calc::Calculator::multiply")
        assert code == 0
        assert any(s["other"] == "calc::Calculator::add"
                   for s in json.loads(stdout)["sites"])

        code, stdout, _ = run_cli(capsys, "query", "--index", str(index_file),
                                  "intent", "subtract two integers", "-k", "3")
        assert code == 0
        assert len(json.loads(stdout)["hits"]) == 3

        code, stdout, _ = run_cli(capsys, "query", "--index", str(index_file),
                                  "grep", "power", "--max-results", "10")
        assert code == 0
        assert json.loads(stdout)["matches"]

        code, stdout, _ = run_cli(capsys, "query", "--index", str(index_file),
                                  "subgraph", "calc::Calculator", "--hops", "1")
        assert code == 0
        assert json.loads(stdout)["nodes"]

    def test_localize_reads_issue_file(self, index_file, tmp_path, capsys):
        issue = tmp_path / "issue.json"
        issue.write_text(json.dumps({
            "title": "subtract broken",
            "body": "`Calculator::subtract` adds instead of subtracting",
        }), encoding="utf-8")
        code, stdout, _ = run_cli(capsys, "query", "--index", str(index_file),
                                  "localize", str(issue))
        assert code == 0
        payload = json.loads(stdout)
        assert payload["candidates"]
        assert payload["mode"] in ("intersection", "intent_only")

    def test_query_requires_a_source(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["query", "find-class", "Calculator"])
        assert exc.value.code == 2


def write_pipeline_inputs(tmp_path, repo_root):
    """Issue, transcripts and a regression manifest for the toy defect."""
    repo = load_repository(repo_root)
    old = repo.unit("src/calc.cpp").content
    fix = make_diff(
        old,
        old.replace("last_result_ = a - b;\n    return a + b;",
                    "last_result_ = a - b;\n    return a - b;"),
        "src/calc.cpp",
    )
    check = (
        "import pathlib, sys; "
        "text = pathlib.Path('src/calc.cpp').read_text(); "
        "sys.exit(0 if 'return a - b;' in text else 1)"
    )
    repro_test = TestCase(test_id="t-subtract", command=(PY, "-c", check))

    issue = tmp_path / "issue.json"
    issue.write_text(json.dumps({
        "title": "Calculator::subtract returns the sum",
        "body": "`Calculator::subtract` adds its arguments.",
    }), encoding="utf-8")

    repro = tmp_path / "repro.jsonl"
    repro.write_text(json.dumps(
        {"turn": "emit", "kind": "test", "test": repro_test.to_dict()}
    ) + "\n", encoding="utf-8")

    gen = tmp_path / "gen.jsonl"
    gen.write_text(json.dumps(
        {"turn": "emit", "kind": "patch", "diff": fix}
    ) + "\n", encoding="utf-8")

    flavor = TestCase(test_id="t-flavor", command=(
        PY, "-c",
        "import pathlib, sys; "
        "sys.exit(0 if 'return \"basic\";' in "
        "pathlib.Path('src/calc.cpp').read_text() else 1)",
    ))
    tests = tmp_path / "tests.json"
    tests.write_text(json.dumps({"tests": [flavor.to_dict()]}),
                     encoding="utf-8")
    return issue, repro, gen, tests, fix


class TestPipelineCommand:
    def test_success_writes_selected_diff(self, toyrepo_root, tmp_path, capsys):
        issue, repro, gen, tests, fix = write_pipeline_inputs(
            tmp_path, toyrepo_root)
        out = tmp_path / "report.json"
        code, stdout, _ = run_cli(
            capsys, "pipeline", "--root", str(toyrepo_root),
            "--issue", str(issue), "--repro-transcript", str(repro),
            "--gen-transcript", str(gen), "--tests", str(tests),
            "--out", str(out),
        )
        assert code == 0
        payload = json.loads(stdout)
        assert payload["status"] == "SUCCESS"
        assert payload["selected_diff"] == fix
        assert json.loads(out.read_text())["selected_diff"] == fix

    def test_all_pruned_exits_five(self, toyrepo_root, tmp_path, capsys):
        issue, repro, _, _, _ = write_pipeline_inputs(tmp_path, toyrepo_root)
        repo = load_repository(toyrepo_root)
        old = repo.unit("src/calc.h").content
        comment_diff = make_diff(
            old,
            old.replace("// Returns the sum of a and b.",
                        "// Adds a and b together."),
            "src/calc.h",
        )
        gen = tmp_path / "gen_comment.jsonl"
        gen.write_text(json.dumps(
            {"turn": "emit", "kind": "patch", "diff": comment_diff}
        ) + "\n", encoding="utf-8")
        code, stdout, _ = run_cli(
            capsys, "pipeline", "--root", str(toyrepo_root),
            "--issue", str(issue), "--repro-transcript", str(repro),
            "--gen-transcript", str(gen),
        )
        assert code == 5
        assert json.loads(stdout)["status"] == "FAILURE"

    def test_reproduction_failure_exits_three(self, toyrepo_root, tmp_path,
                                              capsys):
        issue, _, gen, _, _ = write_pipeline_inputs(tmp_path, toyrepo_root)
        empty = tmp_path / "empty.jsonl"
        empty.write_text("", encoding="utf-8")
        code, stdout, _ = run_cli(
            capsys, "pipeline", "--root", str(toyrepo_root),
            "--issue", str(issue), "--repro-transcript", str(empty),
            "--gen-transcript", str(gen),
        )
        assert code == 3
        assert json.loads(stdout)["status"] == "REPRODUCTION_FAILED"

    def test_generation_failure_exits_four(self, toyrepo_root, tmp_path,
                                           capsys):
        issue, repro, _, _, _ = write_pipeline_inputs(tmp_path, toyrepo_root)
        empty = tmp_path / "empty.jsonl"
        empty.write_text("", encoding="utf-8")
        code, stdout, _ = run_cli(
            capsys, "pipeline", "--root", str(toyrepo_root),
            "--issue", str(issue), "--repro-transcript", str(repro),
            "--gen-transcript", str(empty),
        )
        assert code == 4
        assert json.loads(stdout)["status"] == "GENERATION_FAILED"

    def test_strategy_flag_threads_through(self, toyrepo_root, tmp_path,
                                           capsys):
        issue, repro, gen, tests, _ = write_pipeline_inputs(
            tmp_path, toyrepo_root)
        code, stdout, _ = run_cli(
            capsys, "pipeline", "--root", str(toyrepo_root),
            "--issue", str(issue), "--repro-transcript", str(repro),
            "--gen-transcript", str(gen), "--tests", str(tests),
            "--strategy", "min_complexity",
        )
        assert code == 0
        assert json.loads(stdout)["strategy"] == "min_complexity"


class TestEvalLocCommand:
    def test_rates_from_instances_file(self, tmp_path, capsys):
        instances = tmp_path / "instances.json"
        instances.write_text(json.dumps({"instances": [
            {"instance_id": "i0", "predicted_files": ["a.cpp"],
             "predicted_functions": ["f"], "truth_files": ["a.cpp"],
             "truth_functions": ["g"]},
            {"instance_id": "i1", "predicted_files": ["b.cpp"],
             "predicted_functions": ["h"], "truth_files": ["c.cpp"],
             "truth_functions": ["h"]},
        ]}), encoding="utf-8")
        code, stdout, _ = run_cli(capsys, "eval-loc", "--instances",
                                  str(instances))
        assert code == 0
        payload = json.loads(stdout)
        assert payload["file_rate"] == 0.5
        assert payload["function_rate"] == 0.5
        assert len(payload["per_instance"]) == 2

    def test_duplicate_ids_exit_two(self, tmp_path, capsys):
        instances = tmp_path / "dup.json"
        instances.write_text(json.dumps({"instances": [
            {"instance_id": "same"}, {"instance_id": "same"},
        ]}), encoding="utf-8")
        code, _, stderr = run_cli(capsys, "eval-loc", "--instances",
                                  str(instances))
        assert code == 2
        assert json.loads(stderr)["error_kind"] == "IdMismatch"


class TestConfigFile:
    def test_unknown_keys_fail_loudly(self, toyrepo_root, tmp_path, capsys):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"providor": {"type": "hash"}}),
                          encoding="utf-8")
        code, _, stderr = run_cli(capsys, "index", "--root", str(toyrepo_root),
                                  "--out", str(tmp_path / "x.caidx"),
                                  "--config", str(config))
        assert code == 2
        assert "providor" in stderr

    def test_provider_dim_applies(self, toyrepo_root, tmp_path, capsys):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"provider": {"type": "hash", "dim": 32}}),
                          encoding="utf-8")
        out = tmp_path / "small.caidx"
        code, _, _ = run_cli(capsys, "index", "--root", str(toyrepo_root),
                             "--out", str(out), "--config", str(config))
        assert code == 0
        assert load_index(out).intent.dim == 32


class TestInstalledEntryPoint:
    def test_serve_round_trip_over_stdio(self, index_file):
        requests = [
            json.dumps({"request_id": i, "tool": "FindFunction",
                        "arguments": {"name": name}})
            for i, name in enumerate(["add", "multiply"])
        ] + ["not json"]
        proc = subprocess.run(
            [PY, "-m", "cppatlas", "serve", "--index", str(index_file)],
            input="\n".join(requests) + "\n",
            capture_output=True, text=True, timeout=120,
        )
        assert proc.returncode == 0
        responses = [json.loads(l) for l in proc.stdout.splitlines()]
        assert [r["ok"] for r in responses] == [True, True, False]
        assert responses[2]["error_kind"] == "BadRequest"

    def test_console_script_help(self):
        proc = subprocess.run(["cppatlas", "--help"], capture_output=True,
                              text=True, timeout=60)
        assert proc.returncode == 0
        assert "pipeline" in proc.stdout
