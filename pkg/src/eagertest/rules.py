"""Literature detection rules, evaluated on the same code model as the heuristic."""

from __future__ import annotations

import enum
from typing import Iterator, Optional

from .heuristic import EAGER, NOT_EAGER, Verdict, not_applicable
from .java_model import (
    CallExpr,
    CodeModel,
    Compound,
    Expr,
    FieldAccess,
    Name,
    ResolvedMethod,
    Scope,
    TestCase,
    iter_calls,
    iter_statements,
    leaf_statements,
    resolve_call,
    unwrap,
)
from .stereotypes import Stereotype, StereotypeAnalyzer


class RuleId(str, enum.Enum):
    DR1 = "DR1"
    DR2_1 = "DR2_1"
    DR2_2 = "DR2_2"
    DR2_3 = "DR2_3"
    DR3 = "DR3"
    DR4 = "DR4"

    def __str__(self) -> str:
        return self.value


THRESHOLDS = {RuleId.DR1: 2, RuleId.DR2_1: 3, RuleId.DR2_2: 5, RuleId.DR2_3: 5}
_NEEDS_CUT = (RuleId.DR1, RuleId.DR2_1, RuleId.DR2_2)


def iter_names(expr: Optional[Expr]) -> Iterator[str]:
    """Variable-like names read by ``expr`` (call names excluded)."""
    if expr is None:
        return
    if isinstance(expr, Name):
        yield expr.name
    elif isinstance(expr, FieldAccess):
        yield from iter_names(expr.target)
    elif isinstance(expr, CallExpr):
        yield from iter_names(expr.receiver_expr)
        for a in expr.args:
            yield from iter_names(a)
    elif isinstance(expr, Compound):
        for p in expr.parts:
            yield from iter_names(p)


def _test_calls(test: TestCase) -> Iterator[CallExpr]:
    for stmt in iter_statements(test.method.body or ()):
        yield from stmt.calls


def count_calls(test: TestCase, model: CodeModel, production: bool = False) -> int:
    """Call sites (not constructors) on the class under test.

    With ``production`` also count calls landing in any production-tagged type.
    """
    owner = model.get_type(test.owning_class)
    scope = Scope.for_method(model, owner, test.method)
    n = 0
    for call in _test_calls(test):
        if call.is_constructor:
            continue
        res = resolve_call(call, scope)
        if not isinstance(res, ResolvedMethod):
            continue
        on_cut = test.cut is not None and test.cut in (res.receiver_type, res.declaring_type.qualified_name)
        if on_cut or (production and res.declaring_type.root_tag == "production"):
            n += 1
    return n


def count_cycles(test: TestCase) -> tuple[int, int]:
    """(cycles, asserts): a cycle is non-assert statements followed by asserts."""
    cycles = asserts = 0
    pending = False
    prev_assert = False
    for stmt in leaf_statements(test.method.body or ()):
        is_assert = stmt.kind == "assert-call"
        if is_assert:
            asserts += 1
            if pending and not prev_assert:
                cycles += 1
            pending = False
        else:
            pending = True
        prev_assert = is_assert
    return cycles, asserts


def get_free_asserts(test: TestCase, model: CodeModel, analyzer: Optional[StereotypeAnalyzer] = None) -> tuple[int, int]:
    """(asserts, asserts whose arguments involve no Get result)."""
    analyzer = analyzer or StereotypeAnalyzer(model)
    owner = model.get_type(test.owning_class)
    scope = Scope.for_method(model, owner, test.method)

    def is_get(call: CallExpr) -> bool:
        res = resolve_call(call, scope)
        return analyzer.classify(res, test.cut, True).stereotype is Stereotype.GET

    from_get: dict[str, bool] = {}
    total = free = 0
    for stmt in leaf_statements(test.method.body or ()):
        if stmt.kind == "assert-call":
            total += 1
            call = unwrap(stmt.expr)
            args = call.args if isinstance(call, CallExpr) else ()
            involved = any(is_get(c) for a in args for c in iter_calls(a)) or any(
                from_get.get(n, False) for a in args for n in iter_names(a)
            )
            if not involved:
                free += 1
        elif stmt.assigned_var:
            rhs = stmt.expr
            if isinstance(rhs, Compound) and rhs.op == "=" and len(rhs.parts) == 2:
                rhs = rhs.parts[1]
            outer = unwrap(rhs)
            from_get[stmt.assigned_var] = isinstance(outer, CallExpr) and not outer.is_constructor and is_get(outer)
    return total, free


def apply_rule(
    rule: RuleId,
    test: TestCase,
    model: CodeModel,
    analyzer: Optional[StereotypeAnalyzer] = None,
) -> Verdict:
    rule = RuleId(rule)
    tid = test.test_id
    name = rule.value
    if rule in _NEEDS_CUT and not test.cut_resolved:
        return not_applicable(tid, name, "unresolved-cut", reason=test.cut_note)
    if rule in THRESHOLDS:
        production = rule is RuleId.DR2_3
        n = count_calls(test, model, production=production)
        evidence = {"calls_counted": n, "threshold": THRESHOLDS[rule],
                    "scope": "production" if production else "class-under-test"}
        return Verdict(tid, name, EAGER if n >= THRESHOLDS[rule] else NOT_EAGER, evidence)
    if rule is RuleId.DR3:
        cycles, asserts = count_cycles(test)
        evidence = {"cycles_found": cycles, "asserts_found": asserts}
        return Verdict(tid, name, EAGER if cycles >= 2 else NOT_EAGER, evidence)
    total, free = get_free_asserts(test, model, analyzer)
    evidence = {"asserts_found": total, "asserts_without_get": free}
    return Verdict(tid, name, EAGER if total >= 2 and free >= 1 else NOT_EAGER, evidence)
