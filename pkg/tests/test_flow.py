import itertools

from hypothesis import given, settings, strategies as st

from eagertest.flow import (
    AssertRecord,
    AttrRead,
    CallRecord,
    OutcomeFact,
    analyze_flow,
    collect_meth_outcomes,
    collect_verified_info,
    linearize,
    version_attributes,
)
from eagertest.java_model import CallExpr, extract_test_cases
from eagertest.stereotypes import Stereotype

from conftest import model_from
from oracles import expected_versions

DUMMY = CallExpr("m", None, None, (), 1)


def build_records(ops):
    """Synthetic records for ops drawn from create / mutate / read / assert."""
    records, pending = [], []
    owner, n_created = "o0", 0
    for op in ops:
        i = len(records)
        if op[0] == "create":
            n_created += 1
            owner = f"o{n_created}"
            records.append(CallRecord(i, DUMMY, Stereotype.CREATIONAL, writes=((owner, "x"), (owner, "y")),
                                      creates=True, result=owner))
        elif op[0] == "mutate":
            records.append(CallRecord(i, DUMMY, Stereotype.MUTATOR, writes=((owner, op[1]),)))
        elif op[0] == "read":
            records.append(CallRecord(i, DUMMY, Stereotype.GET, reads=((owner, op[1]),)))
            pending.append(AttrRead(i, owner, op[1]))
        else:
            records.append(AssertRecord(i, None, frozenset(pending)))
            pending = []
    return records


OPS = [("create",), ("mutate", "x"), ("mutate", "y"), ("read", "x"), ("read", "y"), ("assert",)]


def all_sequences(max_len=6):
    for n in range(max_len + 1):
        yield from itertools.product(OPS, repeat=n)


def test_versioning_matches_bruteforce_exhaustively():
    mismatches = checked = 0
    for ops in all_sequences():
        records = version_attributes(build_records(ops))
        writes, reads = expected_versions(ops)
        for rec, w, r in zip(records, writes, reads):
            if not isinstance(rec, CallRecord):
                continue
            checked += 1
            if (w or {}) != rec.write_versions or (r or {}) != rec.read_versions:
                mismatches += 1
    assert checked > 100_000
    assert mismatches == 0


def test_version_monotonicity_per_attribute():
    for ops in all_sequences(5):
        seen = {}
        for rec in version_attributes(build_records(ops)):
            if isinstance(rec, CallRecord):
                for key, v in rec.write_versions.items():
                    if key in seen:
                        assert v > seen[key]
                    seen[key] = v


def test_mutator_sketch_binds_each_assert_to_the_preceding_write():
    # mutator1 mutator2 assertion1 mutator3 assertion2 on one attribute
    ops = [("create",), ("mutate", "x"), ("mutate", "x"), ("read", "x"), ("assert",),
           ("mutate", "x"), ("read", "x"), ("assert",)]
    records = version_attributes(build_records(ops))
    collect_meth_outcomes(records)
    per_assert, union = collect_verified_info(records)
    assert per_assert == [{OutcomeFact.attr("o1", "x", 2)}, {OutcomeFact.attr("o1", "x", 3)}]
    assert records[2].outcome == {OutcomeFact.attr("o1", "x", 2)}
    assert records[5].outcome == {OutcomeFact.attr("o1", "x", 3)}


def test_two_writes_without_reads_verify_nothing():
    records = version_attributes(build_records([("mutate", "x"), ("mutate", "x"), ("assert",)]))
    assert [r.write_versions for r in records[:2]] == [{("o0", "x"): 1}, {("o0", "x"): 2}]
    assert collect_verified_info(records) == ([frozenset()], frozenset())


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from(OPS), max_size=12))
def test_union_is_union_of_per_assert_sets(ops):
    records = version_attributes(build_records(ops))
    outcomes = collect_meth_outcomes(records)
    per_assert, union = collect_verified_info(records)
    assert union == frozenset().union(*per_assert) if per_assert else union == frozenset()
    for rec, outcome in zip([r for r in records if isinstance(r, CallRecord)], outcomes):
        empty_kind = rec.stereotype in (Stereotype.GET, Stereotype.EXTERNAL_PRODUCER, Stereotype.UNKNOWN)
        assert (not outcome) == empty_kind


def test_worked_example_trace(golden_model, golden_cases):
    lt = analyze_flow(golden_cases["test2"], golden_model)
    assert len(lt.calls) == 5 and len(lt.asserts) == 2
    assert lt.calls[4].call.callee_name == "getSize" and lt.calls[4].assert_index == 1
    shown = [sorted(map(str, o)) for o in lt.meth_outcomes]
    assert shown == [
        ["dirEntry0", "dirEntry0.name@v0", "dirEntry0.size@v0"],
        ["dirEntry0.size@v1"],
        ["dirEntry1", "dirEntry1.name@v0", "dirEntry1.size@v0"],
        ["boolean0"],
        [],
    ]
    assert lt.verified == [{OutcomeFact.attr("dirEntry0", "size", 1)}, {OutcomeFact.returned("boolean0")}]


def test_helper_inlined_as_one_creational(golden_model, golden_cases):
    lt = analyze_flow(golden_cases["testAccessors"], golden_model)
    creational = [r for r in lt.calls if r.stereotype is Stereotype.CREATIONAL]
    assert len(creational) == 1 and creational[0].result == "info"


def test_external_producer_in_assert_carries_receiver_facts(golden_model, golden_cases):
    lt = analyze_flow(golden_cases["testFindImplementations"], golden_model)
    assert lt.verified[0] == {OutcomeFact.returned("list")}


SIMPLE = {
    "src/p/Cell.java": """package p;
        public class Cell {
            private int v;
            public Cell() { }
            public int put(int x) { int old = v; v = x; return old; }
            public int get() { return v; }
        }""",
}


def _cases(tmp_path, body, extra=""):
    files = dict(SIMPLE)
    files["test/p/CellTest.java"] = f"""package p;
        import static org.junit.Assert.*;
        import org.junit.Test;
        public class CellTest {{
            {extra}
            @Test public void t() {{ {body} }}
        }}"""
    model = model_from(tmp_path, files)
    return model, extract_test_cases(model)[0]


def test_empty_body(tmp_path):
    model, tc = _cases(tmp_path, "")
    assert linearize(tc, model) == []


def test_discarded_mutator_return_not_in_outcome(tmp_path):
    model, tc = _cases(tmp_path, "Cell c = new Cell(); c.put(3); int old = c.put(4);")
    lt = analyze_flow(tc, model)
    assert [sorted(map(str, o)) for o in lt.meth_outcomes[1:]] == [["c.v@v1"], ["c.v@v2", "old"]]


def test_literal_only_assert(tmp_path):
    model, tc = _cases(tmp_path, "assertTrue(true);")
    lt = analyze_flow(tc, model)
    assert lt.verified_union == frozenset() and len(lt.asserts) == 1


def test_arithmetic_argument_contributes_both_facts(tmp_path):
    model, tc = _cases(tmp_path, "Cell a = new Cell(); Cell b = new Cell(); assertEquals(0, a.get() + b.get());")
    lt = analyze_flow(tc, model)
    assert lt.verified_union == {OutcomeFact.attr("a", "v", 0), OutcomeFact.attr("b", "v", 0)}


def test_recursive_helper_stops_at_depth(tmp_path):
    model, tc = _cases(tmp_path, "assertEquals(0, loop(3).get());",
                       extra="private Cell loop(int n) { return loop(n - 1); }")
    lt = analyze_flow(tc, model)
    assert any("not inlined" in d for d in lt.diagnostics)


def test_expected_exception_makes_an_assert(tmp_path):
    files = dict(SIMPLE)
    files["test/p/CellTest.java"] = """package p;
        import org.junit.Test;
        public class CellTest {
            @Test(expected = IllegalStateException.class)
            public void t() { Cell c = new Cell(); c.put(1); }
        }"""
    model = model_from(tmp_path, files)
    lt = analyze_flow(extract_test_cases(model)[0], model)
    assert len(lt.asserts) == 1 and lt.asserts[0].exceptional
    assert lt.verified_union == {OutcomeFact.attr("c", "v", 1)}


def test_assert_throws_verifies_the_lambda_call(tmp_path):
    model, tc = _cases(tmp_path, "Cell c = new Cell(); assertThrows(RuntimeException.class, () -> c.put(2));")
    lt = analyze_flow(tc, model)
    assert lt.asserts[0].exceptional
    assert lt.verified_union == {OutcomeFact.attr("c", "v", 1)}


def test_assert_all_lambdas_are_verified(tmp_path):
    model, tc = _cases(tmp_path, "Cell c = new Cell(); c.put(1); assertAll(() -> assertEquals(1, c.get()));")
    lt = analyze_flow(tc, model)
    assert len(lt.asserts) == 1 and lt.verified_union == {OutcomeFact.attr("c", "v", 1)}


def test_loop_and_catch_variables_are_locals(tmp_path):
    body = ("Cell c = new Cell(); for (int i = 0; i < 2; i++) { c.put(i); } "
            "try { c.put(5); } catch (RuntimeException e) { fail(e.getMessage()); }")
    model, tc = _cases(tmp_path, body)
    lt = analyze_flow(tc, model)
    assert not any("unresolved name" in d for d in lt.diagnostics)


def test_fluent_mutator_returns_its_receiver(tmp_path):
    files = {"src/p/B.java": """package p;
        public class B {
            private int n;
            public B inc() { n++; return this; }
            public int n() { return n; }
        }""",
        "test/p/BTest.java": """package p;
        import static org.junit.Assert.*;
        import org.junit.Test;
        public class BTest { @Test public void t() { B b = new B(); B same = b.inc(); assertEquals(1, same.n()); } }"""}
    model = model_from(tmp_path, files)
    lt = analyze_flow(extract_test_cases(model)[0], model)
    assert lt.verified_union == {OutcomeFact.attr("b", "n", 1)}
