"""Linearize a test body into call/assert records and track what each checks.

Values flowing through the test are symbolic: a value carries the object
identity it denotes (if any) and the set of facts an assert on it would
verify. Attribute reads stay unresolved (``AttrRead``) until
``version_attributes`` has numbered every write.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Union

from .java_model import (
    CallExpr,
    CodeModel,
    Compound,
    Expr,
    FieldAccess,
    Literal,
    MethodDecl,
    Name,
    Scope,
    Stmt,
    TestCase,
    TypeDecl,
    erase,
    is_assertion_call,
    resolve_call,
    unwrap,
)
from .stereotypes import Classification, StereotypeAnalyzer, Stereotype

logger = logging.getLogger(__name__)

DEFAULT_INLINE_DEPTH = 2

ATTRIBUTE = "attribute"
RETURNED = "returned"


@dataclass(frozen=True, order=True)
class OutcomeFact:
    kind: str
    owner: str
    name: str
    version: Optional[int] = None

    @classmethod
    def attr(cls, owner: str, name: str, version: int) -> "OutcomeFact":
        return cls(ATTRIBUTE, owner, name, version)

    @classmethod
    def returned(cls, owner: str, name: Optional[str] = None) -> "OutcomeFact":
        return cls(RETURNED, owner, name or owner)

    def __str__(self) -> str:
        if self.kind == ATTRIBUTE:
            return f"{self.owner}.{self.name}@v{self.version}"
        return self.owner


@dataclass(frozen=True)
class AttrRead:
    """Read of ``owner.name`` performed by the call record at ``index``."""

    index: int
    owner: str
    name: str


@dataclass(frozen=True)
class OutcomeRef:
    """The whole Step-1 outcome of the call record at ``index``."""

    index: int


FactRef = Union[OutcomeFact, AttrRead, OutcomeRef]


@dataclass(frozen=True)
class Value:
    obj: Optional[str] = None
    refs: frozenset = frozenset()
    derived: bool = False


EMPTY = Value()


@dataclass
class CallRecord:
    index: int
    call: CallExpr
    stereotype: Stereotype
    target: str = ""
    writes: tuple[tuple[str, str], ...] = ()
    reads: tuple[tuple[str, str], ...] = ()
    creates: bool = False
    result: Optional[str] = None
    assert_index: Optional[int] = None
    write_versions: dict = field(default_factory=dict)
    read_versions: dict = field(default_factory=dict)
    outcome: frozenset = frozenset()
    branch: str = ""

    @property
    def line(self) -> int:
        return self.call.line


@dataclass
class AssertRecord:
    index: int
    statement: Optional[Stmt]
    refs: frozenset = frozenset()
    calls: tuple[int, ...] = ()
    exceptional: bool = False
    verified: frozenset = frozenset()
    assert_number: int = 0
    line: Optional[int] = None


Record = Union[CallRecord, AssertRecord]


@dataclass
class LinearizedTest:
    test: TestCase
    records: list
    meth_outcomes: list
    verified: list
    verified_union: frozenset
    diagnostics: list = field(default_factory=list)

    @property
    def calls(self) -> list[CallRecord]:
        return [r for r in self.records if isinstance(r, CallRecord)]

    @property
    def asserts(self) -> list[AssertRecord]:
        return [r for r in self.records if isinstance(r, AssertRecord)]

    def evidence(self) -> dict:
        return {
            "records": [_record_dict(r) for r in self.records],
            "meth_outcomes": [sorted(str(f) for f in o) for o in self.meth_outcomes],
            "verified_info": [sorted(str(f) for f in v) for v in self.verified],
            "verified_union": sorted(str(f) for f in self.verified_union),
            "diagnostics": list(self.diagnostics),
        }


def _record_dict(r: Record) -> dict:
    if isinstance(r, CallRecord):
        d = {
            "index": r.index,
            "kind": "call",
            "call": r.call.callee_name,
            "line": r.line,
            "target": r.target,
            "stereotype": r.stereotype.value,
            "outcome": sorted(str(f) for f in r.outcome),
        }
        if r.assert_index is not None:
            d["in_assert"] = r.assert_index
        return d
    return {
        "index": r.index,
        "kind": "assert",
        "line": r.line,
        "calls": list(r.calls),
        "exceptional": r.exceptional,
        "verified": sorted(str(f) for f in r.verified),
    }


@dataclass
class _Frame:
    scope: Scope
    owner: Optional[TypeDecl]
    env: dict
    depth: int = 0
    ret: Optional[Value] = None
    ret_bind: Optional[str] = None


class _Linearizer:
    def __init__(self, test: TestCase, model: CodeModel, analyzer: StereotypeAnalyzer, inline_depth: int):
        self.test = test
        self.model = model
        self.analyzer = analyzer
        self.inline_depth = inline_depth
        self.test_type = model.get_type(test.owning_class)
        self.records: list[Record] = []
        self.used_ids: set[str] = set()
        self.diagnostics: list[str] = []
        self.assert_index: Optional[int] = None
        self.n_asserts = 0
        self.inline_stack: list[MethodDecl] = []
        self.field_values: dict[str, Value] = {}

    # identities ------------------------------------------------------------

    def fresh(self, hint: str) -> str:
        if hint not in self.used_ids:
            self.used_ids.add(hint)
            return hint
        k = 1
        while f"{hint}#{k}" in self.used_ids:
            k += 1
        name = f"{hint}#{k}"
        self.used_ids.add(name)
        return name

    def note(self, msg: str) -> None:
        if msg not in self.diagnostics:
            self.diagnostics.append(msg)

    # driver ------------------------------------------------------------------

    def run(self) -> list[Record]:
        m = self.test.method
        frame = _Frame(Scope.for_method(self.model, self.test_type, m), self.test_type, {})
        for p, _ in m.params:
            frame.env[p] = Value(p, frozenset({OutcomeFact.returned(p)}))
        self.block(m.body or (), frame)
        if m.expected_exception:
            self._expected_exception()
        return self.records

    def _expected_exception(self) -> None:
        top = [r for r in self.records if isinstance(r, CallRecord) and r.assert_index is None]
        if not top:
            return
        last_line = top[-1].line
        # outermost call of the last statement that made a call
        target = [r for r in top if r.line == last_line][-1]
        self.n_asserts += 1
        self.records.append(
            AssertRecord(len(self.records), None, frozenset({OutcomeRef(target.index)}), (target.index,),
                         exceptional=True, assert_number=self.n_asserts, line=target.line)
        )

    def block(self, stmts, frame: _Frame) -> None:
        for stmt in stmts:
            if frame.ret is not None:
                return
            self.statement(stmt, frame)

    def statement(self, stmt: Stmt, frame: _Frame) -> None:
        if stmt.kind == "assert-call":
            self.assertion(stmt, frame)
            return
        if stmt.kind == "control":
            header = self.eval(stmt.expr, frame)
            if stmt.assigned_var:
                # enhanced for: the loop variable is an element of the iterable
                frame.env[stmt.assigned_var] = Value(self.fresh(stmt.assigned_var), header.refs, True)
            self.block(stmt.children, frame)
            return
        if stmt.kind == "return":
            frame.ret = self.eval(stmt.expr, frame, bind=frame.ret_bind) if stmt.expr is not None else EMPTY
            return
        if stmt.kind == "local-decl":
            frame.env[stmt.assigned_var] = self.eval(stmt.expr, frame, bind=stmt.assigned_var) if stmt.expr else EMPTY
            return
        self.eval(stmt.expr, frame, used=False)

    def assertion(self, stmt: Stmt, frame: _Frame) -> None:
        call = unwrap(stmt.expr)
        assert isinstance(call, CallExpr)
        self._assert(call, stmt, frame)

    def _assert(self, call: CallExpr, stmt: Optional[Stmt], frame: _Frame) -> None:
        outer = self.assert_index
        self.n_asserts += 1
        self.assert_index = self.n_asserts
        first = len(self.records)
        refs: set = set()
        exceptional = call.callee_name == "assertThrows"
        for arg in call.args:
            a = unwrap(arg)
            if exceptional and isinstance(a, Compound) and a.op == "lambda":
                before = len(self.records)
                self.eval(a, frame, used=True)
                inner = [r for r in self.records[before:] if isinstance(r, CallRecord)]
                if inner:
                    refs.add(OutcomeRef(inner[-1].index))
                continue
            refs |= self.eval(arg, frame, used=True).refs
        call_ids = tuple(r.index for r in self.records[first:] if isinstance(r, CallRecord))
        self.records.append(
            AssertRecord(len(self.records), stmt, frozenset(refs), call_ids, exceptional,
                         assert_number=self.assert_index, line=call.line)
        )
        self.assert_index = outer

    # expressions ---------------------------------------------------------------

    def eval(self, expr: Optional[Expr], frame: _Frame, bind: Optional[str] = None, used: bool = True) -> Value:
        if expr is None or isinstance(expr, Literal):
            return EMPTY
        if isinstance(expr, Name):
            return self.name(expr.name, frame)
        if isinstance(expr, FieldAccess):
            target = unwrap(expr.target)
            if isinstance(target, Name) and target.name == "this":
                return self.name(expr.name, frame)
            base = self.eval(expr.target, frame)
            if base is EMPTY:
                return EMPTY  # Type.CONSTANT
            return Value(None, base.refs, True)
        if isinstance(expr, CallExpr):
            return self.call(expr, frame, bind, used)
        if expr.op in ("cast", "()") and expr.parts:
            return self.eval(expr.parts[-1], frame, bind, used)
        if expr.op == "=" and len(expr.parts) == 2:
            v = self.eval(expr.parts[1], frame, bind=_var(expr.parts[0]))
            target = _var(expr.parts[0])
            if target and target in frame.env:
                frame.env[target] = v
            return v
        if expr.op == "instanceof" and expr.parts:
            v = self.eval(expr.parts[0], frame)
            if len(expr.parts) > 2 and isinstance(expr.parts[-1], Name):
                frame.env[expr.parts[-1].name] = v  # pattern variable aliases the tested value
            return Value(None, v.refs, True) if v.refs else EMPTY
        if expr.op == "lambda":
            refs = set()
            for part in expr.parts:
                refs |= self.eval(part, frame, used=False).refs
            # only an enclosing assert (assertAll, assertThrows) looks inside
            if self.assert_index is None or not refs:
                return EMPTY
            return Value(None, frozenset(refs), True)
        refs: set = set()
        for part in expr.parts:
            refs |= self.eval(part, frame).refs
        return Value(None, frozenset(refs), True) if refs else EMPTY

    def name(self, name: str, frame: _Frame) -> Value:
        if name in frame.env:
            return frame.env[name]
        if name == "this":
            return Value("this", frozenset({OutcomeFact.returned("this")}))
        if name in frame.scope.variables:
            return EMPTY  # declared local not yet bound (loop header, catch)
        if frame.scope.field_type(name) is not None:
            # fixture field of the test class: an object not created here
            if name not in self.field_values:
                self.used_ids.add(name)
                self.field_values[name] = Value(name, frozenset({OutcomeFact.returned(name)}))
            return self.field_values[name]
        if name[:1].isupper() or self.model.find_type(name, frame.owner) is not None:
            return EMPTY
        sid = self.fresh(f"?{name}")
        self.note(f"unresolved name '{name}' treated as an opaque value {sid}")
        return Value(sid, frozenset({OutcomeFact.returned(sid)}))

    def _test_helper(self, call: CallExpr, frame: _Frame) -> Optional[MethodDecl]:
        if call.is_constructor or self.test_type is None or frame.owner is not self.test_type:
            return None
        recv = unwrap(call.receiver_expr)
        if recv is not None and not (isinstance(recv, Name) and recv.name == "this"):
            return None
        for m in self.test_type.methods:
            if (m.name == call.callee_name and not m.is_constructor and m.body is not None
                    and m.accepts(call.arity) and "Test" not in m.annotations):
                return m
        return None

    def call(self, call: CallExpr, frame: _Frame, bind: Optional[str], used: bool) -> Value:
        if is_assertion_call(call):
            if self.assert_index is None:
                self._assert(call, None, frame)  # e.g. inside a forEach lambda
                return EMPTY
            refs = frozenset().union(*(self.eval(a, frame).refs for a in call.args)) if call.args else frozenset()
            return Value(None, refs, True) if refs else EMPTY
        helper = self._test_helper(call, frame)
        if helper is not None:
            if frame.depth < self.inline_depth and helper not in self.inline_stack:
                return self.inline(helper, call, frame, bind)
            self.note(f"helper {helper.name} not inlined (depth limit {self.inline_depth} or recursion)")

        recv = unwrap(call.receiver_expr)
        recv_val = self.eval(call.receiver_expr, frame) if recv is not None else None
        args = [self.eval(a, frame) for a in call.args]
        target = resolve_call(call, frame.scope)
        wants_value = used or bind is not None
        cls: Classification = self.analyzer.classify(target, self.test.cut, wants_value)
        if cls.diagnostic:
            self.note(cls.diagnostic)
        idx = len(self.records)
        rec = CallRecord(idx, call, cls.stereotype, cls.method, assert_index=self.assert_index, branch=cls.branch)
        self.records.append(rec)
        st = cls.stereotype
        arg_refs = frozenset().union(*(a.refs for a in args)) if args else frozenset()
        hint = bind or call.callee_name

        if st is Stereotype.CREATIONAL:
            type_name = erase(call.callee_name) if call.is_constructor else cls.declaring_type.rsplit(".", 1)[-1]
            oid = self.fresh(bind or f"{type_name}@{idx}")
            rec.creates = True
            rec.writes = tuple((oid, f) for f in sorted(cls.effect.writes))
            rec.result = oid
            return Value(oid, frozenset({OutcomeFact.returned(oid, bind)}))

        if st is Stereotype.MUTATOR:
            owner = self._owner(recv_val, cls, idx)
            writes = [(owner, f) for f in sorted(cls.effect.writes)]
            for p, f in sorted(cls.effect.param_writes):
                if p < len(args) and args[p].obj:
                    writes.append((args[p].obj, f))
            rec.writes = tuple(writes)
            if cls.effect.returns_this and recv_val is not None and recv_val.obj:
                return recv_val  # fluent setter: the result is the receiver
            if wants_value and cls.effect.has_return_value:
                rid = self.fresh(hint)
                rec.result = rid
                return Value(rid, frozenset({OutcomeFact.returned(rid, bind)}), True)
            return EMPTY

        if st is Stereotype.GET:
            attr = cls.effect.returns_field
            if recv_val is not None and recv_val.derived and recv_val.refs:
                refs = recv_val.refs
            else:
                owner = self._owner(recv_val, cls, idx)
                rec.reads = ((owner, attr),)
                refs = frozenset({AttrRead(idx, owner, attr)})
            return Value(self.fresh(hint), refs, True)

        if st is Stereotype.INTERNAL_PRODUCER:
            rid = self.fresh(hint)
            rec.result = rid
            return Value(rid, frozenset({OutcomeFact.returned(rid, bind)}), True)

        # ExternalProducer / Unknown
        if call.is_constructor:
            return Value(self.fresh(bind or f"{erase(call.callee_name)}@{idx}"), arg_refs)
        if not wants_value:
            return EMPTY
        refs = arg_refs | (recv_val.refs if recv_val is not None else frozenset())
        return Value(self.fresh(hint), refs, True)

    def _owner(self, recv_val: Optional[Value], cls: Classification, idx: int) -> str:
        if recv_val is None or recv_val is EMPTY:
            # static member (or an implicit this inside a helper)
            if cls.declaring_type:
                return cls.declaring_type.rsplit(".", 1)[-1]
        if recv_val is not None and recv_val.obj:
            return recv_val.obj
        oid = self.fresh(f"?obj@{idx}")
        self.note(f"receiver of call {idx} has no tracked identity; using {oid}")
        return oid

    def inline(self, helper: MethodDecl, call: CallExpr, frame: _Frame, bind: Optional[str]) -> Value:
        args = [self.eval(a, frame) for a in call.args]
        scope = Scope.for_method(self.model, self.test_type, helper)
        inner = _Frame(scope, self.test_type, {}, frame.depth + 1, ret_bind=bind)
        for i, (pname, _) in enumerate(helper.params):
            inner.env[pname] = args[i] if i < len(args) else EMPTY
        self.inline_stack.append(helper)
        try:
            self.block(helper.body or (), inner)
        finally:
            self.inline_stack.pop()
        return inner.ret or EMPTY


def _var(expr: Optional[Expr]) -> Optional[str]:
    expr = unwrap(expr)
    return expr.name if isinstance(expr, Name) else None


def linearize(
    test: TestCase,
    model: CodeModel,
    inline_depth: int = DEFAULT_INLINE_DEPTH,
    analyzer: Optional[StereotypeAnalyzer] = None,
    diagnostics: Optional[list] = None,
) -> list[Record]:
    """Call and assert records of one test, in execution order."""
    if not test.cut_resolved:
        raise ValueError(f"class under test not resolved for {test.test_id}")
    lin = _Linearizer(test, model, analyzer or StereotypeAnalyzer(model), inline_depth)
    records = lin.run()
    if diagnostics is not None:
        diagnostics.extend(lin.diagnostics)
    return records


def version_attributes(records: list[Record]) -> list[Record]:
    """Number attribute writes and bind every read to the latest prior write.

    A creational write starts an attribute at version 0; each later write
    takes one more than the highest version seen so far. A read of an
    attribute never written before it binds to a synthesized version 0.
    """
    latest: dict[tuple[str, str], int] = {}
    highest: dict[tuple[str, str], int] = {}
    for rec in records:
        if not isinstance(rec, CallRecord):
            continue
        rec.read_versions = {}
        for key in rec.reads:
            rec.read_versions[key] = latest.get(key, 0)
        rec.write_versions = {}
        for key in rec.writes:
            v = 0 if rec.creates else highest.get(key, 0) + 1
            rec.write_versions[key] = v
            latest[key] = v
            highest[key] = max(highest.get(key, 0), v)
    return records


def _outcome(rec: CallRecord) -> frozenset:
    st = rec.stereotype
    if st in (Stereotype.CREATIONAL, Stereotype.MUTATOR):
        facts = {OutcomeFact.attr(o, n, rec.write_versions[(o, n)]) for o, n in rec.writes}
        if rec.result:
            facts.add(OutcomeFact.returned(rec.result))
        return frozenset(facts)
    if st is Stereotype.INTERNAL_PRODUCER and rec.result:
        return frozenset({OutcomeFact.returned(rec.result)})
    return frozenset()


def collect_meth_outcomes(records: list[Record]) -> list[frozenset]:
    out = []
    for rec in records:
        if isinstance(rec, CallRecord):
            rec.outcome = _outcome(rec)
            out.append(rec.outcome)
    return out


def _resolve(ref: FactRef, records: list[Record]) -> frozenset:
    if isinstance(ref, OutcomeFact):
        return frozenset({ref})
    if isinstance(ref, AttrRead):
        rec = records[ref.index]
        v = rec.read_versions.get((ref.owner, ref.name), 0)
        return frozenset({OutcomeFact.attr(ref.owner, ref.name, v)})
    rec = records[ref.index]
    return _outcome(rec)


def collect_verified_info(records: list[Record]) -> tuple[list[frozenset], frozenset]:
    per_assert = []
    for rec in records:
        if isinstance(rec, AssertRecord):
            facts: set = set()
            for ref in rec.refs:
                facts |= _resolve(ref, records)
            rec.verified = frozenset(facts)
            per_assert.append(rec.verified)
    union = frozenset().union(*per_assert) if per_assert else frozenset()
    return per_assert, union


def analyze_flow(
    test: TestCase,
    model: CodeModel,
    inline_depth: int = DEFAULT_INLINE_DEPTH,
    analyzer: Optional[StereotypeAnalyzer] = None,
) -> LinearizedTest:
    """linearize + version + collect, packaged for the detector."""
    diags: list[str] = []
    records = version_attributes(linearize(test, model, inline_depth, analyzer, diags))
    for rec in records:
        if isinstance(rec, CallRecord):
            for key, v in rec.read_versions.items():
                if v == 0 and not any(
                    isinstance(r, CallRecord) and key in r.writes and r.index < rec.index for r in records
                ):
                    msg = f"{key[0]}.{key[1]} read before any write; assuming its initial state (v0)"
                    if msg not in diags:
                        diags.append(msg)
    outcomes = collect_meth_outcomes(records)
    per_assert, union = collect_verified_info(records)
    return LinearizedTest(test, records, outcomes, per_assert, union, diags)
