"""Method stereotypes relative to a class under test.

Classification works from the field reads/writes a method performs on its
declaring type. Only Creational and Mutator methods declared in the class
under test keep those stereotypes; a Get may live anywhere; producers split
into internal/external by where they are implemented.
"""

from __future__ import annotations

import enum
import logging
import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .java_model import (
    ASSIGN_OPS,
    UPDATE_OPS,
    CallExpr,
    CodeModel,
    Compound,
    Expr,
    FieldAccess,
    Literal,
    MethodDecl,
    Name,
    ResolvedMethod,
    TypeDecl,
    Unresolved,
    erase,
    iter_statements,
    unwrap,
)

logger = logging.getLogger(__name__)

DEFAULT_EFFECT_DEPTH = 2

# Names of library methods that change the receiver (collections, builders).
_MUTATING_CALL = re.compile(
    r"^(add|addAll|put|putAll|remove|removeAll|removeIf|retainAll|clear|set[A-Z_]?\w*|push|pop|offer|poll"
    r"|insert|append|delete|sort|fill|compute|computeIfAbsent|computeIfPresent|merge|reset|close)$"
)
_KEYED_LOOKUP = frozenset({"get", "getOrDefault"})
_REFLECTIVE = frozenset({"invoke", "newInstance"})

_SETTER_NAME = re.compile(r"^(set|add|remove|clear)(\w*)$")
_GETTER_NAME = re.compile(r"^(get|is)(\w+)$")


class Stereotype(str, enum.Enum):
    CREATIONAL = "Creational"
    MUTATOR = "Mutator"
    GET = "Get"
    INTERNAL_PRODUCER = "InternalProducer"
    EXTERNAL_PRODUCER = "ExternalProducer"
    UNKNOWN = "Unknown"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class FieldEffect:
    reads: frozenset[str] = frozenset()
    writes: frozenset[str] = frozenset()
    returns_field: Optional[str] = None
    has_return_value: bool = False
    # (parameter index, field name) pairs written on argument objects
    param_writes: frozenset[tuple[int, str]] = frozenset()
    returns_this: bool = False
    approximate: bool = False
    name_based: bool = False


@dataclass(frozen=True)
class Classification:
    stereotype: Stereotype
    method: str
    declaring_type: Optional[str]
    effect: FieldEffect = field(default_factory=FieldEffect)
    branch: str = ""
    diagnostic: str = ""

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "declaring_type": self.declaring_type,
            "stereotype": self.stereotype.value,
            "reads": sorted(self.effect.reads),
            "writes": sorted(self.effect.writes),
            "rationale_branch": self.branch,
        }


def _lower_first(s: str) -> str:
    return s[:1].lower() + s[1:]


def name_based_effect(method: MethodDecl) -> Optional[FieldEffect]:
    """Effects guessed from an accessor-style name when there is no body."""
    m = _SETTER_NAME.match(method.name)
    if m and (m.group(2) == "" or m.group(2)[0].isupper()):
        attr = _lower_first(m.group(2)) or method.name
        return FieldEffect(
            reads=frozenset({attr}),
            writes=frozenset({attr}),
            has_return_value=method.return_type is not None,
            name_based=True,
        )
    m = _GETTER_NAME.match(method.name)
    if m and m.group(2)[0].isupper() and method.return_type is not None:
        attr = _lower_first(m.group(2))
        return FieldEffect(
            reads=frozenset({attr}), returns_field=attr, has_return_value=True, name_based=True
        )
    return None


class _EffectWalker:
    def __init__(self, analyzer: "StereotypeAnalyzer", owner: TypeDecl, method: MethodDecl, depth: int):
        self.analyzer = analyzer
        self.model = analyzer.model
        self.owner = owner
        self.method = method
        self.depth = depth
        self.field_names = {f.name for f in owner.fields}
        for sup in self.model.supertypes(owner):
            self.field_names.update(f.name for f in sup.fields)
        self.params = {name: i for i, (name, _) in enumerate(method.params)}
        self.locals: set[str] = set()
        for stmt in iter_statements(method.body or ()):
            if stmt.assigned_var and stmt.declared_type:
                self.locals.add(stmt.assigned_var)
        self.reads: set[str] = set()
        self.writes: set[str] = set()
        self.param_writes: set[tuple[int, str]] = set()
        self.approximate = False

    def field_of(self, expr: Optional[Expr]) -> Optional[str]:
        """Field of the declaring type denoted by ``expr``, if any."""
        expr = unwrap(expr)
        if isinstance(expr, Name):
            if expr.name in self.field_names and expr.name not in self.locals and expr.name not in self.params:
                return expr.name
        elif isinstance(expr, FieldAccess) and isinstance(expr.target, Name):
            if expr.target.name in ("this", self.owner.name) and expr.name in self.field_names:
                return expr.name
        elif isinstance(expr, Compound) and expr.op == "index" and expr.parts:
            return self.field_of(expr.parts[0])
        return None

    def param_of(self, expr: Optional[Expr]) -> Optional[int]:
        expr = unwrap(expr)
        if isinstance(expr, Name) and expr.name in self.params and expr.name not in self.locals:
            return self.params[expr.name]
        return None

    def visit(self, expr: Optional[Expr]) -> None:
        if expr is None or isinstance(expr, Literal):
            return
        if isinstance(expr, Name):
            f = self.field_of(expr)
            if f:
                self.reads.add(f)
            return
        if isinstance(expr, FieldAccess):
            f = self.field_of(expr)
            if f:
                self.reads.add(f)
                return
            target = unwrap(expr.target)
            # other.size inside equals(): reading the same attribute on a peer
            if isinstance(target, Name) and expr.name in self.field_names:
                self.reads.add(expr.name)
            self.visit(expr.target)
            return
        if isinstance(expr, CallExpr):
            self.visit_call(expr)
            return
        if expr.op in ASSIGN_OPS and expr.parts:
            target, rest = expr.parts[0], expr.parts[1:]
            f = self.field_of(target)
            if f:
                self.writes.add(f)
                if expr.op != "=":
                    self.reads.add(f)
            else:
                t = unwrap(target)
                if isinstance(t, FieldAccess):
                    p = self.param_of(t.target)
                    if p is not None:
                        self.param_writes.add((p, t.name))
                    self.visit(t.target)
                elif isinstance(t, Compound):
                    self.visit(t)
            for part in rest:
                self.visit(part)
            return
        if expr.op in UPDATE_OPS and expr.parts:
            f = self.field_of(expr.parts[0])
            if f:
                self.writes.add(f)
                self.reads.add(f)
                return
        if expr.op == "this-call" and self.method.is_constructor:
            self.merge_same_type(self.owner.name, len(expr.parts), constructor=True)
        for part in expr.parts:
            self.visit(part)

    def merge_same_type(self, name: str, arity: int, constructor: bool = False) -> None:
        target = next(
            (m for m in self.owner.methods if m.name == name and m.is_constructor == constructor and m.accepts(arity)),
            None,
        )
        if target is None:
            for sup in self.model.supertypes(self.owner):
                target = next((m for m in sup.methods if m.name == name and not m.is_constructor and m.accepts(arity)), None)
                if target is not None:
                    break
        if target is None or target is self.method:
            return
        if self.depth <= 0:
            self.approximate = True
            return
        eff = self.analyzer.field_effects(target, self.depth - 1)
        self.reads |= eff.reads
        self.writes |= eff.writes
        self.approximate |= eff.approximate

    def visit_call(self, call: CallExpr) -> None:
        recv = unwrap(call.receiver_expr)
        for arg in call.args:
            self.visit(arg)
        if call.is_constructor:
            return
        if recv is None or (isinstance(recv, Name) and recv.name in ("this", self.owner.name)):
            self.merge_same_type(call.callee_name, call.arity)
            return
        f = self.field_of(recv)
        if f is not None:
            self.reads.add(f)
            if self._call_mutates(recv, call):
                self.writes.add(f)
            return
        root = self._chain_root_field(recv)
        if root is not None and _MUTATING_CALL.match(call.callee_name):
            # items.get(k).add(v): mutating the object reached through a field
            self.writes.add(root)
        p = self.param_of(recv)
        if p is not None:
            for attr in self._call_writes(self.method.params[p][1], call):
                self.param_writes.add((p, attr))
            return
        self.visit(recv)

    def _call_writes(self, receiver_type: Optional[str], call: CallExpr) -> frozenset[str]:
        t = self.model.find_type(erase(receiver_type), self.owner)
        if t is not None:
            m = next((m for m in [*t.methods, *(x for s in self.model.supertypes(t) for x in s.methods)]
                      if m.name == call.callee_name and not m.is_constructor and m.accepts(call.arity)), None)
            if m is not None:
                if self.depth <= 0:
                    self.approximate = True
                    return frozenset()
                return self.analyzer.field_effects(m, self.depth - 1).writes
        if _MUTATING_CALL.match(call.callee_name):
            return frozenset({"state"})
        return frozenset()

    def _call_mutates(self, recv: Expr, call: CallExpr) -> bool:
        f = self.field_of(recv)
        decl = self.owner.field(f) if f else None
        return bool(self._call_writes(decl.type_name if decl else None, call))

    def _chain_root_field(self, expr: Optional[Expr]) -> Optional[str]:
        expr = unwrap(expr)
        while isinstance(expr, CallExpr) and expr.receiver_expr is not None:
            expr = unwrap(expr.receiver_expr)
        return self.field_of(expr)

    def returns_this(self) -> bool:
        returns = [unwrap(s.expr) for s in iter_statements(self.method.body or ()) if s.kind == "return"]
        return bool(returns) and all(isinstance(e, Name) and e.name == "this" for e in returns)

    def returns_field(self) -> Optional[str]:
        returned: set[Optional[str]] = set()
        any_return = False
        for stmt in iter_statements(self.method.body or ()):
            if stmt.kind != "return" or stmt.expr is None:
                continue
            any_return = True
            expr = unwrap(stmt.expr)
            f = self.field_of(expr)
            if f is None and isinstance(expr, CallExpr) and expr.callee_name in _KEYED_LOOKUP:
                # keyed getter: return this.map.get(key)
                f = self.field_of(expr.receiver_expr)
            returned.add(f)
        if any_return and len(returned) == 1:
            return next(iter(returned))
        return None


class StereotypeAnalyzer:
    """Field effects and stereotypes over one code model, memoized per run."""

    def __init__(self, model: CodeModel, effect_depth: int = DEFAULT_EFFECT_DEPTH):
        self.model = model
        self.effect_depth = effect_depth
        self._effects: dict[tuple[str, str, int, int], FieldEffect] = {}
        self._classes: dict[tuple, Classification] = {}

    def field_effects(self, method: MethodDecl, depth: Optional[int] = None) -> FieldEffect:
        depth = self.effect_depth if depth is None else depth
        key = (method.declaring_type, method.name, method.span[0], depth)
        if key in self._effects:
            return self._effects[key]
        # placeholder breaks recursion cycles between mutually calling methods
        self._effects[key] = FieldEffect(approximate=True)
        eff = self._compute_effects(method, depth)
        self._effects[key] = eff
        return eff

    def _compute_effects(self, method: MethodDecl, depth: int) -> FieldEffect:
        has_value = method.return_type is not None and not method.is_constructor
        if method.body is None:
            guessed = name_based_effect(method)
            if guessed is not None:
                return guessed
            return FieldEffect(has_return_value=has_value)
        owner = self.model.get_type(method.declaring_type)
        if owner is None:
            return FieldEffect(has_return_value=has_value)
        walker = _EffectWalker(self, owner, method, depth)
        for stmt in iter_statements(method.body):
            walker.visit(stmt.expr)
        returns_field = walker.returns_field() if has_value else None
        reads = set(walker.reads)
        if returns_field:
            reads.add(returns_field)
        return FieldEffect(
            reads=frozenset(reads),
            writes=frozenset(walker.writes),
            returns_field=returns_field,
            has_return_value=has_value,
            param_writes=frozenset(walker.param_writes),
            returns_this=has_value and walker.returns_this(),
            approximate=walker.approximate,
        )

    def initialized_fields(self, method: MethodDecl, declaring: TypeDecl) -> frozenset[str]:
        """Attributes a creational call initializes on the new object."""
        instance_fields = [f for f in declaring.fields if not f.is_static]
        if method.body is None or not method.is_constructor:
            return frozenset(f.name for f in instance_fields)
        eff = self.field_effects(method)
        with_init = {f.name for f in instance_fields if f.initializer is not None}
        return frozenset(eff.writes | with_init) & frozenset(f.name for f in instance_fields)

    def classify(
        self,
        target: Union[ResolvedMethod, Unresolved],
        cut: Optional[str],
        returns_value: Optional[bool] = None,
    ) -> Classification:
        key = (target, cut, returns_value)
        if key not in self._classes:
            self._classes[key] = self._classify(target, cut, returns_value)
        return self._classes[key]

    def _in_cut(self, declaring: TypeDecl, cut: Optional[str]) -> bool:
        return cut is not None and declaring.qualified_name == cut

    def _classify(self, target, cut, returns_value) -> Classification:
        if isinstance(target, Unresolved):
            label = f"{target.receiver_type or '?'}.{target.callee_name}"
            if target.callee_name in _REFLECTIVE:
                return Classification(Stereotype.UNKNOWN, label, None, branch="reflective",
                                      diagnostic="reflective call cannot be analyzed statically")
            if returns_value:
                return Classification(Stereotype.EXTERNAL_PRODUCER, label, None,
                                      FieldEffect(has_return_value=True), branch="external-with-return")
            return Classification(Stereotype.UNKNOWN, label, None, branch="external-void")

        method, declaring = target.method, target.declaring_type
        label = method.signature
        in_cut = self._in_cut(declaring, cut)
        factory = method.is_static and erase(method.return_type) in (declaring.name, declaring.qualified_name)
        if method.is_constructor or factory:
            eff = FieldEffect(writes=self.initialized_fields(method, declaring), has_return_value=True)
            if in_cut:
                return Classification(Stereotype.CREATIONAL, label, declaring.qualified_name, eff,
                                      branch="constructor" if method.is_constructor else "static-factory")
            return Classification(Stereotype.UNKNOWN, label, declaring.qualified_name, eff,
                                  branch="creational-outside-cut",
                                  diagnostic=f"{label} creates an object outside the class under test")

        eff = self.field_effects(method)
        if eff.writes or eff.param_writes:
            if in_cut:
                return Classification(Stereotype.MUTATOR, label, declaring.qualified_name, eff, branch="writes-in-cut")
            return Classification(Stereotype.UNKNOWN, label, declaring.qualified_name, eff,
                                  branch="mutator-outside-cut",
                                  diagnostic=f"{label} mutates state outside the class under test")
        if eff.returns_field and eff.reads:
            return Classification(Stereotype.GET, label, declaring.qualified_name, eff, branch="returns-field")
        if eff.has_return_value:
            if in_cut:
                return Classification(Stereotype.INTERNAL_PRODUCER, label, declaring.qualified_name, eff,
                                      branch="computed-return-in-cut")
            return Classification(Stereotype.EXTERNAL_PRODUCER, label, declaring.qualified_name, eff,
                                  branch="computed-return-outside-cut")
        return Classification(Stereotype.UNKNOWN, label, declaring.qualified_name, eff, branch="void-no-writes")


def field_effects(method: MethodDecl, model: CodeModel, depth: int = DEFAULT_EFFECT_DEPTH) -> FieldEffect:
    return StereotypeAnalyzer(model, depth).field_effects(method)


def classify_method(
    method: Union[ResolvedMethod, Unresolved],
    cut: Optional[str],
    model: CodeModel,
    returns_value: Optional[bool] = None,
    depth: int = DEFAULT_EFFECT_DEPTH,
) -> Stereotype:
    return StereotypeAnalyzer(model, depth).classify(method, cut, returns_value).stereotype
