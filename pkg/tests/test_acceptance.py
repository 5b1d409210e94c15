"""Acceptance criteria, one check each, reported as PASS/FAIL lines.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import random
import subprocess
import sys
import tempfile
import time
from pathlib import Path

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))

from eagertest.agreement import ContingencyTable, build_matrix, cohen_kappa, landis_koch_band  # noqa: E402
from eagertest.flow import CallRecord, version_attributes  # noqa: E402
from eagertest.heuristic import EAGER, NOT_EAGER  # noqa: E402
from eagertest.java_model import extract_test_cases, parse_sources  # noqa: E402
from eagertest.report import ALL_DETECTORS, DETECTORS, DetectorContext, RunConfig, run_analysis  # noqa: E402
from eagertest.rules import RuleId, apply_rule  # noqa: E402
from eagertest.stereotypes import StereotypeAnalyzer  # noqa: E402

from conftest import GOLDEN_SRC, GOLDEN_TESTS  # noqa: E402
from oracles import expected_versions, kappa_bruteforce  # noqa: E402
from synth import random_corpus  # noqa: E402
from test_flow import all_sequences, build_records  # noqa: E402

RESULTS: list[str] = []

E, N = EAGER, NOT_EAGER
# fixture method -> {detector: expected}; blank cells omitted
TABLE = {
    "test2": {"heuristic": E},
    "test3": {"heuristic": E, "DR1": N},
    "testConstr": {"heuristic": E, "DR1": N},
    "testGetConnectionUserPassSetters": {"heuristic": N, "DR1": E},
    "testAccessors": {"heuristic": N, "DR1": E},
    "testEntities": {"heuristic": E, "DR1": E, "DR2_1": N, "DR2_2": N},
    "testEquals": {"heuristic": E, "DR3": N},
    "testBasic": {"heuristic": N, "DR3": E},
    "testGetSetter": {"heuristic": E, "DR4": N},
    "testFindImplementations": {"heuristic": N, "DR4": E},
}


def _record(number: int, title: str, ok: bool, detail: str) -> None:
    RESULTS.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} - {detail}")
    print(RESULTS[-1])
    assert ok, detail


def _golden():
    model = parse_sources([(GOLDEN_SRC, "production"), (GOLDEN_TESTS, "test")])
    return model, {tc.method.name: tc for tc in extract_test_cases(model)}


def test_criterion_1_golden_verdicts():
    start = time.perf_counter()
    model, cases = _golden()
    ctx = DetectorContext(model, StereotypeAnalyzer(model))
    wrong, cells = [], 0
    for method, expected in TABLE.items():
        for det, want in expected.items():
            cells += 1
            got = DETECTORS[det](cases[method], ctx).result
            if got != want:
                wrong.append(f"{method}/{det}: got {got}, want {want}")
    elapsed = time.perf_counter() - start
    ok = not wrong and len(cases) == 10 and elapsed < 5
    _record(1, "golden fixture verdicts", ok,
            f"{cells - len(wrong)}/{cells} cells match in {elapsed:.2f}s" + (f"; {wrong}" if wrong else ""))


def test_criterion_2_worked_example_trace():
    report = run_analysis(RunConfig([str(GOLDEN_TESTS)], [str(GOLDEN_SRC)], ["heuristic"], verbose_evidence=True))
    v = next(r for r in report.rows if r.method == "test2").verdicts["heuristic"]
    ev = v.evidence
    ok = (
        len(ev["meth_outcomes"]) == 5
        and ev["meth_outcomes"][1] == ["dirEntry0.size@v1"]
        and ev["meth_outcomes"][4] == []
        and sorted(ev["verified_union"]) == ["boolean0", "dirEntry0.size@v1"]
        and ev["containment_count"] == 0
        and v.result == EAGER
    )
    _record(2, "worked-example trace", ok,
            f"{len(ev['meth_outcomes'])} outcomes, VerifiedInfo={ev['verified_union']}, "
            f"count={ev['containment_count']}, verdict={v.result}")


def test_criterion_3_rule_monotonicity():
    model, cases = _golden()
    corpus = [(tc, model) for tc in cases.values()]
    with tempfile.TemporaryDirectory() as tmp:
        test, src = random_corpus(Path(tmp), n=60)
        smodel = parse_sources([(src, "production"), (test, "test")])
        synthetic = [(tc, smodel) for tc in extract_test_cases(smodel)]
        corpus += synthetic
        violations = 0
        for tc, m in corpus:
            r = {rule: apply_rule(rule, tc, m).result == EAGER for rule in RuleId}
            violations += (r[RuleId.DR2_2] and not r[RuleId.DR2_1])
            violations += (r[RuleId.DR2_1] and not r[RuleId.DR1])
            violations += (r[RuleId.DR2_2] and not r[RuleId.DR2_3])
    ok = violations == 0 and len(synthetic) >= 50
    _record(3, "rule monotonicity", ok, f"{violations} violations over {len(corpus)} tests ({len(synthetic)} synthetic)")


def test_criterion_4_versioning_oracle():
    sequences = mismatches = 0
    for ops in all_sequences(6):
        sequences += 1
        records = version_attributes(build_records(ops))
        writes, reads = expected_versions(ops)
        for rec, w, r in zip(records, writes, reads):
            if isinstance(rec, CallRecord) and ((w or {}) != rec.write_versions or (r or {}) != rec.read_versions):
                mismatches += 1
    _record(4, "versioning oracle", mismatches == 0, f"{mismatches} mismatches over {sequences} sequences")


def test_criterion_5_kappa():
    identical = ["eager", "not-eager", "eager", "eager", "not-eager"]
    k_same = build_matrix({"a": identical, "b": list(identical)}).get("a", "b").kappa
    rng = random.Random(5)
    worst = 0.0
    undefined_mismatch = 0
    for _ in range(1000):
        cells = [rng.randint(0, 50) for _ in range(4)]
        cells[rng.randrange(4)] += 1
        got, want = cohen_kappa(ContingencyTable(*cells)), kappa_bruteforce(*cells)
        if (got is None) != (want is None):
            undefined_mismatch += 1
        elif got is not None:
            worst = max(worst, abs(got - want))
    band = landis_koch_band(0.4751)
    ok = k_same == 1.0 and worst <= 1e-12 and undefined_mismatch == 0 and band == "moderate"
    _record(5, "kappa correctness", ok, f"identical={k_same}, max |diff|={worst:.2e} over 1000 tables, 0.4751->{band}")


def test_criterion_6_determinism(tmp_path):
    outs = []
    for i in range(2):
        out = tmp_path / f"run{i}.json"
        subprocess.run(
            [sys.executable, "-m", "eagertest.cli", "analyze", "--tests", str(GOLDEN_TESTS),
             "--src", str(GOLDEN_SRC), "--out", str(out)],
            check=True, capture_output=True,
        )
        outs.append(out.read_bytes())
    _record(6, "determinism", outs[0] == outs[1], f"two analyze runs, {len(outs[0])} bytes, identical={outs[0] == outs[1]}")


def test_criterion_7_disagreement():
    report = run_analysis(RunConfig([str(GOLDEN_TESTS)], [str(GOLDEN_SRC)], list(ALL_DETECTORS)))
    k1 = report.matrix.get("heuristic", "DR1").kappa
    k4 = report.matrix.get("heuristic", "DR4").kappa
    ok = k1 is not None and k4 is not None and k1 < 1.0 and k4 < 1.0
    _record(7, "disagreement smoke check", ok, f"kappa(heuristic,DR1)={k1:.4f}, kappa(heuristic,DR4)={k4:.4f}")


if __name__ == "__main__":
    import pytest

    raise SystemExit(pytest.main([__file__, "-q"]))
