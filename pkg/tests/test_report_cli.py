import json

import pytest
from click.testing import CliRunner

from eagertest.cli import main
from eagertest.report import ALL_DETECTORS, RunConfig, emit, render_markdown, run_analysis, validate_report

from conftest import GOLDEN_SRC, GOLDEN_TESTS


@pytest.fixture(scope="module")
def full_report():
    return run_analysis(RunConfig([str(GOLDEN_TESTS)], [str(GOLDEN_SRC)]))


def test_full_corpus_shape(full_report):
    assert len(full_report.rows) == 10
    assert all(set(r.verdicts) == set(ALL_DETECTORS) for r in full_report.rows)
    assert len(full_report.matrix.detectors) == 7
    assert len(full_report.agreement) == 21
    for s in full_report.summary().values():
        assert s["eager"] + s["not_eager"] + s["not_applicable"] == 10


def test_rows_sorted(full_report):
    keys = [(r.file, r.cls, r.method) for r in full_report.rows]
    assert keys == sorted(keys)


def test_json_round_trip(full_report, tmp_path):
    path = tmp_path / "r.json"
    emit(full_report, "json", str(path))
    data = json.loads(path.read_text())
    validate_report(data)
    assert data == full_report.to_dict()
    assert data["schema_version"] == "1.0"


def test_csv_lines(full_report):
    lines = emit(full_report, "csv").splitlines()
    assert len(lines) == 11
    assert lines[0].split(",") == ["file", "class", "method", *ALL_DETECTORS]


def test_single_detector_has_no_matrix():
    report = run_analysis(RunConfig([str(GOLDEN_TESTS)], [str(GOLDEN_SRC)], ["heuristic"]))
    assert report.matrix is None and report.to_dict()["agreement"] == []
    assert "Agreement" not in render_markdown(report)


def test_markdown_two_detectors_one_off_diagonal_cell():
    report = run_analysis(RunConfig([str(GOLDEN_TESTS)], [str(GOLDEN_SRC)], ["heuristic", "DR1"]))
    md = render_markdown(report)
    table = md.split("## Agreement")[1]
    rows = [l for l in table.splitlines() if l.startswith("| heuristic") or l.startswith("| DR1")]
    cells = [c.strip() for r in rows for c in r.strip("|").split("|")[1:]]
    off_diag = [c for c in cells if c and not c.startswith("1.0000")]
    assert len(off_diag) == 1 and "(slight)" in off_diag[0]


def test_verbose_evidence_contains_trace():
    report = run_analysis(RunConfig([str(GOLDEN_TESTS)], [str(GOLDEN_SRC)], ["heuristic"], verbose_evidence=True))
    ev = next(r for r in report.rows if r.method == "test2").verdicts["heuristic"].evidence
    assert len(ev["meth_outcomes"]) == 5
    assert ev["verified_union"] == ["boolean0", "dirEntry0.size@v1"]


def test_invalid_config():
    with pytest.raises(ValueError):
        run_analysis(RunConfig([str(GOLDEN_TESTS)], detectors=["DR9"]))
    with pytest.raises(ValueError):
        run_analysis(RunConfig([]))


def test_cli_analyze_and_agree(tmp_path):
    runner = CliRunner()
    out = tmp_path / "r.json"
    res = runner.invoke(main, ["analyze", "--tests", str(GOLDEN_TESTS), "--src", str(GOLDEN_SRC),
                               "--detectors", "heuristic,DR1,DR4", "--out", str(out)])
    assert res.exit_code == 0, res.output
    data = json.loads(out.read_text())
    assert data["config_echo"]["detectors"] == ["heuristic", "DR1", "DR4"]
    res = runner.invoke(main, ["agree", "--verdicts", str(out)])
    assert res.exit_code == 0
    pairs = json.loads(res.output)["agreement"]
    assert {(p["a"], p["b"]) for p in pairs} == {("heuristic", "DR1"), ("heuristic", "DR4"), ("DR1", "DR4")}
    assert pairs == data["agreement"]


def test_cli_warnings_and_usage_errors(tmp_path):
    runner = CliRunner()
    empty = tmp_path / "empty"
    empty.mkdir()
    res = runner.invoke(main, ["analyze", "--tests", str(empty)])
    assert res.exit_code == 1 and "no test cases" in res.output
    res = runner.invoke(main, ["analyze", "--tests", str(empty), "--detectors", "bogus"])
    assert res.exit_code == 2
    res = runner.invoke(main, ["analyze", "--tests", str(tmp_path / "missing")])
    assert res.exit_code == 2
    res = runner.invoke(main, ["analyze", "--tests", str(empty), "--inline-depth", "-1"])
    assert res.exit_code == 2


def test_cli_formats(tmp_path):
    runner = CliRunner()
    res = runner.invoke(main, ["analyze", "--tests", str(GOLDEN_TESTS), "--src", str(GOLDEN_SRC), "--format", "csv"])
    assert res.exit_code == 0 and len(res.output.splitlines()) == 11
    res = runner.invoke(main, ["analyze", "--tests", str(GOLDEN_TESTS), "--src", str(GOLDEN_SRC), "--format", "markdown"])
    assert res.exit_code == 0 and res.output.startswith("# Eager test report")
