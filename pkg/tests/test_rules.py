import pytest

from eagertest.heuristic import EAGER, NOT_APPLICABLE, NOT_EAGER
from eagertest.java_model import extract_test_cases, parse_sources
from eagertest.rules import RuleId, apply_rule, count_cycles

from conftest import model_from
from synth import random_corpus

E, N = EAGER, NOT_EAGER
GOLDEN_RULES = [
    ("test3", RuleId.DR1, N),
    ("testConstr", RuleId.DR1, N),
    ("testGetConnectionUserPassSetters", RuleId.DR1, E),
    ("testAccessors", RuleId.DR1, E),
    ("testEntities", RuleId.DR1, E),
    ("testEntities", RuleId.DR2_1, N),
    ("testEntities", RuleId.DR2_2, N),
    ("testEquals", RuleId.DR3, N),
    ("testBasic", RuleId.DR3, E),
    ("testGetSetter", RuleId.DR4, N),
    ("testFindImplementations", RuleId.DR4, E),
]


@pytest.mark.parametrize("method,rule,expected", GOLDEN_RULES)
def test_golden_rule_verdicts(golden_model, golden_cases, method, rule, expected):
    assert apply_rule(rule, golden_cases[method], golden_model).result == expected


def test_counters_exposed(golden_model, golden_cases):
    v = apply_rule(RuleId.DR1, golden_cases["testEntities"], golden_model)
    assert v.evidence["calls_counted"] == 2
    v = apply_rule(RuleId.DR3, golden_cases["testBasic"], golden_model)
    assert v.evidence == {"cycles_found": 2, "asserts_found": 2}


def test_empty_body_never_eager(tmp_path):
    model = model_from(tmp_path, {
        "src/p/A.java": "package p; public class A { }",
        "test/p/ATest.java": "package p; import org.junit.Test; public class ATest { @Test public void t() { } }",
    })
    tc = extract_test_cases(model)[0]
    assert all(apply_rule(r, tc, model).result == NOT_EAGER for r in RuleId)


def test_unresolved_cut(tmp_path):
    model = model_from(tmp_path, {
        "test/p/ZTest.java": "package p; import org.junit.Test; public class ZTest { @Test public void t() { } }",
    })
    tc = extract_test_cases(model)[0]
    for rule in (RuleId.DR1, RuleId.DR2_1, RuleId.DR2_2):
        assert apply_rule(rule, tc, model).result == NOT_APPLICABLE
    assert apply_rule(RuleId.DR3, tc, model).result == NOT_EAGER


def _corpus_cases(tmp_path, golden_model, golden_cases):
    test, src = random_corpus(tmp_path, n=60)
    model = parse_sources([(src, "production"), (test, "test")])
    synthetic = [(tc, model) for tc in extract_test_cases(model)]
    assert len(synthetic) >= 50
    return synthetic + [(tc, golden_model) for tc in golden_cases.values()]


def test_threshold_and_scope_monotonicity(tmp_path, golden_model, golden_cases):
    violations = []
    for tc, model in _corpus_cases(tmp_path, golden_model, golden_cases):
        r = {rule: apply_rule(rule, tc, model).result == EAGER for rule in RuleId}
        if r[RuleId.DR2_2] and not r[RuleId.DR2_1]:
            violations.append((tc.method.name, "2.2=>2.1"))
        if r[RuleId.DR2_1] and not r[RuleId.DR1]:
            violations.append((tc.method.name, "2.1=>1"))
        if r[RuleId.DR2_2] and not r[RuleId.DR2_3]:
            violations.append((tc.method.name, "2.2=>2.3"))
    assert violations == []


def test_dr3_eager_implies_two_asserts(tmp_path, golden_model, golden_cases):
    for tc, model in _corpus_cases(tmp_path, golden_model, golden_cases):
        cycles, asserts = count_cycles(tc)
        if cycles >= 2:
            assert asserts >= 2
