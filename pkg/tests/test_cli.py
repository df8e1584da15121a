"""Command line: subcommands, exit codes, error lines and logging."""

from __future__ import annotations

import json
import logging
from pathlib import Path

import pytest

from lec_optimizer.cli import main

FIXTURES = Path(__file__).parent / "fixtures"


def _inputs(name: str) -> list[str]:
    root = FIXTURES / name
    return [
        "--catalog",
        str(root / "catalog.json"),
        "--query",
        str(root / "query.json"),
        "--env",
        str(root / "env.json"),
    ]


@pytest.fixture(autouse=True)
def _detach_cli_logging():
    yield
    package = logging.getLogger("lec_optimizer")
    for handler in list(package.handlers):
        package.removeHandler(handler)
    package.setLevel(logging.NOTSET)


def _run_json(capsys: pytest.CaptureFixture[str], *args: str) -> dict:
    assert main(list(args)) == 0
    return json.loads(capsys.readouterr().out)


def test_optimize_lec_c_json(capsys: pytest.CaptureFixture[str]) -> None:
    payload = _run_json(capsys, "optimize", "--algo", "lec-c", *_inputs("example1"), "--json")

    assert payload["algorithm"] == "lec-c"
    assert payload["order"] == ["A", "B"]
    assert payload["methods"] == ["GraceHash"]
    assert payload["final_sort"] is True
    assert payload["expected_cost"] == pytest.approx(2_812_000.0)
    assert "fixed_memory" not in payload


@pytest.mark.parametrize(
    ("extra", "fixed", "method"),
    [
        ([], 1740.0, "SortMerge"),
        (["--lsc-point", "mode"], 2000.0, "SortMerge"),
        (["--memory", "700"], 700.0, "GraceHash"),
    ],
)
def test_optimize_lsc_points(capsys: pytest.CaptureFixture[str], extra: list[str], fixed: float, method: str) -> None:
    payload = _run_json(capsys, "optimize", "--algo", "lsc", *_inputs("example1"), "--json", *extra)

    assert payload["fixed_memory"] == pytest.approx(fixed)
    assert payload["methods"] == [method]


def test_optimize_text_output(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["optimize", "--algo", "lsc", *_inputs("example1")]) == 0

    out = capsys.readouterr().out
    assert out.startswith("lsc at memory 1,740.00\n")
    assert "SortMerge" in out


def test_json_output_is_byte_identical(capsys: pytest.CaptureFixture[str]) -> None:
    args = ["optimize", "--algo", "lec-d", *_inputs("dynamic_three"), "--json"]

    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    assert capsys.readouterr().out == first


def test_written_plan_can_be_simulated(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    plan_path = tmp_path / "plan.json"
    assert main(["optimize", "--algo", "lec-b", "--c", "2", *_inputs("example1"), "--out", str(plan_path)]) == 0
    capsys.readouterr()
    assert json.loads(plan_path.read_text(encoding="utf-8"))["algorithm"] == "lec-b"

    report = _run_json(
        capsys, "simulate", "--plan", str(plan_path), *_inputs("example1"), "--trials", "2000", "--json"
    )

    assert report["trials"] == 2000
    assert report["seed"] == 0
    assert report["mean"] == pytest.approx(2_812_000.0)
    assert report["std_error"] == 0.0


def test_oracle_json_and_text(capsys: pytest.CaptureFixture[str]) -> None:
    payload = _run_json(capsys, "oracle", *_inputs("example1"), "--json")

    assert payload["best"]["methods"] == ["GraceHash"]
    assert payload["plan_count"] == 6
    assert len(payload["plans"]) == 6

    assert main(["oracle", *_inputs("example1")]) == 0
    out = capsys.readouterr().out
    assert out.startswith("6 plans over 2 joint points\n")
    assert "A GraceHash(B) +Sort" in out


def test_oracle_refusal_exits_two(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["oracle", *_inputs("five_relations"), "--max-relations", "4"]) == 2

    err = capsys.readouterr().err
    assert "lec-opt: error: oracle:max_relations: oracle refused" in err


def test_compare_labels_follow_the_ranking(capsys: pytest.CaptureFixture[str]) -> None:
    payload = _run_json(
        capsys, "compare", "--algo", "lsc", "--algo", "lec-c", *_inputs("example1"), "--trials", "4000", "--json"
    )

    assert payload["labels"] == ["lec-c", "lsc"]
    assert payload["per_plan"][0]["index"] == 1
    assert payload["per_plan"][1]["diff_mean"] > 0.0


def test_compare_text_output(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["compare", "--algo", "lec-a", *_inputs("example1"), "--trials", "500"]) == 0

    out = capsys.readouterr().out
    assert out.startswith("trials: 500  seed: 0")
    assert "lec-a" in out


@pytest.mark.parametrize(
    ("args", "fixture", "location"),
    [
        (["optimize", "--algo", "lec-z"], "example1", "arguments"),
        (["optimize", "--algo", "lsc", "--memory", "700", "--lsc-point", "mode"], "example1", "arguments"),
        (["compare"], "example1", "compare"),
        (["optimize", "--algo", "lec-a"], "dynamic_three", "optimize"),
    ],
    ids=["unknown-algorithm", "exclusive-flags", "compare-without-plans", "static-only"],
)
def test_usage_errors_exit_one(
    capsys: pytest.CaptureFixture[str], args: list[str], fixture: str, location: str
) -> None:
    assert main([*args, *_inputs(fixture)]) == 1

    err = capsys.readouterr().err
    assert err.startswith(f"lec-opt: error: {location}: ")


def test_missing_input_names_the_file(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    args = _inputs("example1")
    args[1] = str(tmp_path / "absent.json")

    assert main(["optimize", "--algo", "lec-c", *args]) == 1

    err = capsys.readouterr().err
    assert f"{tmp_path / 'absent.json'}:$: file does not exist" in err


def test_invalid_input_reports_the_json_path(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    catalog = tmp_path / "catalog.json"
    catalog.write_text(json.dumps({"relations": [{"name": "A", "pages": -5}]}), encoding="utf-8")
    args = _inputs("example1")
    args[1] = str(catalog)

    assert main(["optimize", "--algo", "lec-c", *args]) == 1

    err = capsys.readouterr().err
    assert err.startswith(f"lec-opt: error: {catalog}:$.relations[0].pages: ")


def test_mismatched_plan_file_is_rejected(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    plan = tmp_path / "plan.json"
    plan.write_text(json.dumps({"order": ["A", "B"], "methods": ["SortMerge"]}), encoding="utf-8")

    assert main(["simulate", "--plan", str(plan), *_inputs("dynamic_three")]) == 1

    assert capsys.readouterr().err.startswith("lec-opt: error: simulate: ")


def test_unknown_log_level_warns(monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]) -> None:
    monkeypatch.setenv("LEC_LOG", "bogus")

    assert main(["optimize", "--algo", "lsc", *_inputs("example1"), "--json"]) == 0

    captured = capsys.readouterr()
    assert "unknown LEC_LOG value 'bogus', using info" in captured.err
    assert json.loads(captured.out)["algorithm"] == "lsc"


def test_quiet_log_level_silences_info(monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]) -> None:
    monkeypatch.setenv("LEC_LOG", "quiet")

    assert main(["optimize", "--algo", "lec-c", *_inputs("example1"), "--json"]) == 0

    assert capsys.readouterr().err == ""
