"""Parsed view of Java production and test sources.

The model is deliberately shallow: types, fields, methods, statements and
call expressions, plus enough name resolution (declared types, arity-based
overloads) for stereotype lookup. Parsing is done with tree-sitter; a unit
that contains syntax errors is skipped and recorded as a diagnostic.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Optional, Union

import tree_sitter_java
from tree_sitter import Language, Node, Parser

logger = logging.getLogger(__name__)

JAVA = Language(tree_sitter_java.language())

DEFAULT_ASSERTION_APIS = (
    "assertEquals",
    "assertTrue",
    "assertFalse",
    "assertNull",
    "assertNotNull",
    "assertSame",
    "assertNotSame",
    "assertArrayEquals",
    "assertThat",
    "fail",
    "assertThrows",
    "assertNotEquals",
    "assertAll",
)
ASSERT_QUALIFIERS = frozenset(
    {
        "Assert",
        "Assertions",
        "org.junit.Assert",
        "org.junit.jupiter.api.Assertions",
        "junit.framework.Assert",
        "junit.framework.TestCase",
    }
)

ROOT_TAGS = ("test", "production", "external")

CONTROL_NODES = {
    "if_statement",
    "for_statement",
    "enhanced_for_statement",
    "while_statement",
    "do_statement",
    "try_statement",
    "try_with_resources_statement",
    "switch_expression",
    "switch_statement",
    "synchronized_statement",
    "labeled_statement",
    "block",
}


class JavaModelError(Exception):
    """Raised for hard failures (unreadable roots)."""


# --------------------------------------------------------------------------
# Expressions


@dataclass(frozen=True)
class Literal:
    text: str


@dataclass(frozen=True)
class Name:
    """A bare identifier: local variable, field, or type name."""

    name: str


@dataclass(frozen=True)
class FieldAccess:
    target: "Expr"
    name: str


@dataclass(frozen=True)
class CallExpr:
    callee_name: str
    receiver: Optional[str]
    receiver_expr: Optional["Expr"]
    args: tuple["Expr", ...]
    line: int
    is_constructor: bool = False
    bound_to: Optional[str] = None

    @property
    def arity(self) -> int:
        return len(self.args)


@dataclass(frozen=True)
class Compound:
    """Any other expression form; ``parts`` are its operand expressions.

    ``op`` is the operator text for binary/unary/assignment forms, or a
    node-kind tag such as ``cast``, ``lambda``, ``array``, ``ternary``.
    """

    op: str
    parts: tuple["Expr", ...]
    type_name: Optional[str] = None


Expr = Union[Literal, Name, FieldAccess, CallExpr, Compound]

ASSIGN_OPS = frozenset({"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>="})
UPDATE_OPS = frozenset({"++", "--"})


def unwrap(expr: Optional[Expr]) -> Optional[Expr]:
    """Strip casts and parentheses."""
    while isinstance(expr, Compound) and expr.op in ("cast", "()") and expr.parts:
        expr = expr.parts[-1]
    return expr


def iter_calls(expr: Optional[Expr]) -> Iterator[CallExpr]:
    """Yield calls contained in ``expr`` innermost first (post-order)."""
    if expr is None or isinstance(expr, (Literal, Name)):
        return
    if isinstance(expr, FieldAccess):
        yield from iter_calls(expr.target)
    elif isinstance(expr, CallExpr):
        yield from iter_calls(expr.receiver_expr)
        for arg in expr.args:
            yield from iter_calls(arg)
        yield expr
    else:
        for part in expr.parts:
            yield from iter_calls(part)


def dotted_name(expr: Optional[Expr]) -> Optional[str]:
    """``a.b.C`` for chains of plain names, else None."""
    if isinstance(expr, Name):
        return expr.name
    if isinstance(expr, FieldAccess):
        head = dotted_name(expr.target)
        return f"{head}.{expr.name}" if head else None
    return None


# --------------------------------------------------------------------------
# Declarations


@dataclass(frozen=True)
class Stmt:
    kind: str  # local-decl | expression | assert-call | control | return | other
    calls: tuple[CallExpr, ...]
    source_span: tuple[int, int]
    expr: Optional[Expr] = None
    assigned_var: Optional[str] = None
    declared_type: Optional[str] = None
    children: tuple["Stmt", ...] = ()

    @property
    def outer_call(self) -> Optional[CallExpr]:
        e = unwrap(self.expr)
        return e if isinstance(e, CallExpr) else None


@dataclass(frozen=True)
class FieldDecl:
    name: str
    type_name: str
    is_static: bool = False
    initializer: Optional[Expr] = None


@dataclass(frozen=True)
class MethodDecl:
    name: str
    declaring_type: str
    is_constructor: bool = False
    is_static: bool = False
    params: tuple[tuple[str, str], ...] = ()
    return_type: Optional[str] = None  # None means void
    body: Optional[tuple[Stmt, ...]] = None
    annotations: tuple[str, ...] = ()
    modifiers: tuple[str, ...] = ()
    span: tuple[int, int] = (0, 0)
    expected_exception: Optional[str] = None
    is_implicit: bool = False

    @property
    def arity(self) -> int:
        return len(self.params)

    @property
    def is_varargs(self) -> bool:
        return bool(self.params) and self.params[-1][1].endswith("...")

    def accepts(self, n_args: int) -> bool:
        if self.is_varargs:
            return n_args >= self.arity - 1
        return n_args == self.arity

    @property
    def signature(self) -> str:
        kinds = ", ".join(t for _, t in self.params)
        return f"{self.declaring_type}.{self.name}({kinds})"


@dataclass(frozen=True)
class TypeDecl:
    qualified_name: str
    kind: str = "class"
    fields: tuple[FieldDecl, ...] = ()
    methods: tuple[MethodDecl, ...] = ()
    supertypes: tuple[str, ...] = ()
    is_test_class: bool = False
    root_tag: str = "production"
    file: str = ""
    imports: tuple[str, ...] = ()

    @property
    def name(self) -> str:
        return self.qualified_name.rsplit(".", 1)[-1]

    @property
    def package(self) -> str:
        return self.qualified_name.rsplit(".", 1)[0] if "." in self.qualified_name else ""

    def field(self, name: str) -> Optional[FieldDecl]:
        for f in self.fields:
            if f.name == name:
                return f
        return None

    @property
    def constructors(self) -> tuple[MethodDecl, ...]:
        return tuple(m for m in self.methods if m.is_constructor)


@dataclass(frozen=True)
class Diagnostic:
    file: str
    message: str
    line: int = 0


@dataclass(frozen=True)
class CodeModel:
    types: tuple[TypeDecl, ...] = ()
    source_roots: tuple[tuple[str, str], ...] = ()
    diagnostics: tuple[Diagnostic, ...] = ()

    @cached_property
    def _by_qname(self) -> dict[str, TypeDecl]:
        return {t.qualified_name: t for t in self.types}

    @cached_property
    def _by_simple(self) -> dict[str, list[TypeDecl]]:
        out: dict[str, list[TypeDecl]] = {}
        for t in self.types:
            out.setdefault(t.name, []).append(t)
        return out

    def get_type(self, qualified_name: str) -> Optional[TypeDecl]:
        return self._by_qname.get(qualified_name)

    def find_type(self, name: Optional[str], context: Optional[TypeDecl] = None) -> Optional[TypeDecl]:
        """Resolve a (possibly simple) raw type name as seen from ``context``."""
        if not name:
            return None
        name = erase(name)
        if name in self._by_qname:
            return self._by_qname[name]
        simple = name.rsplit(".", 1)[-1]
        candidates = self._by_simple.get(simple, [])
        if not candidates:
            return None
        if len(candidates) == 1:
            return candidates[0]
        if context is not None:
            for imp in context.imports:
                for c in candidates:
                    if imp == c.qualified_name or (imp.endswith(".*") and c.package == imp[:-2]):
                        return c
            for c in candidates:
                if c.package == context.package:
                    return c
        return candidates[0]

    def supertypes(self, t: TypeDecl) -> list[TypeDecl]:
        """Transitive supertypes present in the model, nearest first."""
        out: list[TypeDecl] = []
        seen = {t.qualified_name}
        queue = [t]
        while queue:
            cur = queue.pop(0)
            for s in cur.supertypes:
                st = self.find_type(s, cur)
                if st is not None and st.qualified_name not in seen:
                    seen.add(st.qualified_name)
                    out.append(st)
                    queue.append(st)
        return out

    def is_subtype(self, t: TypeDecl, ancestor: str) -> bool:
        return t.qualified_name == ancestor or any(
            s.qualified_name == ancestor for s in self.supertypes(t)
        )

    def types_tagged(self, tag: str) -> list[TypeDecl]:
        return [t for t in self.types if t.root_tag == tag]


@dataclass(frozen=True)
class TestCase:
    owning_class: str
    method: MethodDecl
    cut: Optional[str]
    framework: str
    file: str = ""
    cut_note: str = ""

    @property
    def cut_resolved(self) -> bool:
        return self.cut is not None

    @property
    def test_id(self) -> tuple[str, str, str]:
        return (self.file, self.owning_class, self.method.name)


# --------------------------------------------------------------------------
# Resolution


@dataclass(frozen=True)
class ResolvedMethod:
    method: MethodDecl
    declaring_type: TypeDecl
    receiver_type: Optional[str] = None
    note: str = ""


@dataclass(frozen=True)
class Unresolved:
    callee_name: str
    receiver_type: Optional[str] = None
    reason: str = "external"


def erase(type_name: Optional[str]) -> Optional[str]:
    """Drop generic arguments and whitespace: ``List<Foo>`` -> ``List``."""
    if type_name is None:
        return None
    out, depth = [], 0
    for ch in type_name:
        if ch == "<":
            depth += 1
        elif ch == ">":
            depth -= 1
        elif depth == 0 and not ch.isspace():
            out.append(ch)
    return "".join(out)


class Scope:
    """Declared types of variables visible at a point of a method body.

    Type tracking is declared-type only; ``var`` takes the constructed type.
    """

    def __init__(self, model: CodeModel, owner: Optional[TypeDecl], variables: Optional[dict[str, str]] = None):
        self.model = model
        self.owner = owner
        self.variables: dict[str, str] = dict(variables or {})

    @classmethod
    def for_method(cls, model: CodeModel, owner: Optional[TypeDecl], method: MethodDecl) -> "Scope":
        scope = cls(model, owner, {n: erase(t) or t for n, t in method.params})
        for stmt in iter_statements(method.body or ()):
            if stmt.assigned_var and stmt.declared_type:
                scope.declare(stmt.assigned_var, stmt.declared_type, stmt.expr)
        return scope

    def child(self, owner: Optional[TypeDecl] = None) -> "Scope":
        return Scope(self.model, owner or self.owner, {})

    def declare(self, name: str, declared_type: str, init: Optional[Expr] = None) -> None:
        t = erase(declared_type)
        if t == "var":
            t = self.type_of(init) if init is not None else None
        if t:
            self.variables[name] = t

    def field_type(self, name: str) -> Optional[str]:
        t = self.owner
        while t is not None:
            f = t.field(name)
            if f is not None:
                return erase(f.type_name)
            supers = self.model.supertypes(t)
            t = next((s for s in supers if s.field(name)), None)
        return None

    def is_variable(self, name: str) -> bool:
        return name in self.variables or self.field_type(name) is not None

    def type_of(self, expr: Optional[Expr]) -> Optional[str]:
        expr = unwrap_parens(expr)
        if expr is None or isinstance(expr, Literal):
            return _literal_type(expr.text) if isinstance(expr, Literal) else None
        if isinstance(expr, Name):
            if expr.name == "this":
                return self.owner.qualified_name if self.owner else None
            if expr.name in self.variables:
                return self.variables[expr.name]
            return self.field_type(expr.name)
        if isinstance(expr, FieldAccess):
            if isinstance(expr.target, Name) and expr.target.name == "this":
                return self.field_type(expr.name)
            target_t = self.model.find_type(self.type_of(expr.target), self.owner)
            if target_t is not None:
                f = target_t.field(expr.name)
                return erase(f.type_name) if f else None
            return None
        if isinstance(expr, CallExpr):
            if expr.is_constructor:
                return erase(expr.callee_name)
            res = resolve_call(expr, self)
            if isinstance(res, ResolvedMethod):
                return erase(res.method.return_type)
            return None
        if isinstance(expr, Compound) and expr.op == "cast":
            return erase(expr.type_name)
        return None


def unwrap_parens(expr: Optional[Expr]) -> Optional[Expr]:
    while isinstance(expr, Compound) and expr.op == "()" and expr.parts:
        expr = expr.parts[0]
    return expr


def _literal_type(text: str) -> Optional[str]:
    if text.startswith('"'):
        return "String"
    if text in ("true", "false"):
        return "boolean"
    return None


def _find_method(model: CodeModel, t: TypeDecl, name: str, n_args: int, constructor: bool) -> tuple[Optional[MethodDecl], Optional[TypeDecl], str]:
    chain = [t] if constructor else [t, *model.supertypes(t)]
    for owner in chain:
        named = [m for m in owner.methods if m.name == name and m.is_constructor == constructor]
        matches = [m for m in named if m.accepts(n_args)]
        if matches:
            note = ""
            if len(matches) > 1:
                note = f"{len(matches)} overloads of arity {n_args}; first declaration chosen"
            return matches[0], owner, note
    return None, None, ""


def resolve_call(call: CallExpr, scope: Scope) -> Union[ResolvedMethod, Unresolved]:
    """Bind a call site to the method declaration it invokes.

    Resolution is by the receiver's declared type and the call's arity,
    searching supertypes; no subtype narrowing.
    """
    model = scope.model
    if call.is_constructor:
        t = model.find_type(call.callee_name, scope.owner)
        if t is None:
            return Unresolved(call.callee_name, erase(call.callee_name))
        m, owner, note = _find_method(model, t, t.name, call.arity, constructor=True)
        if m is None:
            if t.constructors or call.arity:
                return Unresolved(call.callee_name, t.qualified_name, "no matching constructor")
            m = MethodDecl(
                name=t.name,
                declaring_type=t.qualified_name,
                is_constructor=True,
                return_type=t.name,
                body=None,
                is_implicit=True,
            )
            owner = t
        return ResolvedMethod(m, owner, t.qualified_name, note)

    recv = unwrap_parens(call.receiver_expr)
    static = False
    if recv is None or (isinstance(recv, Name) and recv.name == "this"):
        receiver_type = scope.owner.qualified_name if scope.owner else None
    elif isinstance(recv, Name) and recv.name == "super":
        supers = model.supertypes(scope.owner) if scope.owner else []
        receiver_type = supers[0].qualified_name if supers else None
    elif isinstance(recv, (Name, FieldAccess)) and not _is_value(recv, scope):
        receiver_type = dotted_name(recv)
        static = True
    else:
        receiver_type = scope.type_of(recv)

    if receiver_type is None:
        return Unresolved(call.callee_name, None, "unknown receiver")
    t = model.find_type(receiver_type, scope.owner)
    if t is None:
        return Unresolved(call.callee_name, receiver_type)
    m, owner, note = _find_method(model, t, call.callee_name, call.arity, constructor=False)
    if m is None:
        return Unresolved(call.callee_name, t.qualified_name)
    if static and not m.is_static:
        note = (note + "; " if note else "") + "instance method called through type name"
    return ResolvedMethod(m, owner, t.qualified_name, note)


def _is_value(expr: Expr, scope: Scope) -> bool:
    """True when a name chain denotes a variable/field rather than a type."""
    if isinstance(expr, Name):
        return expr.name == "this" or scope.is_variable(expr.name)
    if isinstance(expr, FieldAccess):
        return _is_value(expr.target, scope) or (
            isinstance(expr.target, Name) and expr.target.name == "this"
        )
    return True


def is_assertion_call(expr: Optional[Expr], assertion_apis: Iterable[str] = DEFAULT_ASSERTION_APIS) -> bool:
    """A call to a JUnit/Hamcrest-style assertion, bare or via an assert class."""
    call = unwrap(expr)
    if not isinstance(call, CallExpr) or call.is_constructor:
        return False
    if call.callee_name not in assertion_apis:
        return False
    return call.receiver_expr is None or call.receiver in ASSERT_QUALIFIERS


def iter_statements(body: Iterable[Stmt]) -> Iterator[Stmt]:
    """All statements in source order, control statements before their children."""
    for stmt in body:
        yield stmt
        if stmt.children:
            yield from iter_statements(stmt.children)


def leaf_statements(body: Iterable[Stmt]) -> Iterator[Stmt]:
    """Statements with control structure flattened away (loops visited once)."""
    for stmt in body:
        if stmt.kind == "control":
            yield from leaf_statements(stmt.children)
        else:
            yield stmt


# --------------------------------------------------------------------------
# Parsing


def _text(node: Optional[Node]) -> str:
    return node.text.decode("utf-8") if node is not None else ""


def _line(node: Node) -> int:
    return node.start_point[0] + 1


class _Builder:
    def __init__(self, assertion_apis: Iterable[str]):
        self.assertion_apis = frozenset(assertion_apis)

    # expressions ---------------------------------------------------------

    def expr(self, node: Optional[Node], bound_to: Optional[str] = None) -> Optional[Expr]:
        if node is None:
            return None
        t = node.type
        if t in ("line_comment", "block_comment"):
            return None
        if t == "identifier":
            return Name(_text(node))
        if t in ("this", "super"):
            return Name(t)
        if t.endswith("_literal") and t not in ("class_literal",) or t in ("true", "false", "null_literal"):
            return Literal(_text(node))
        if t == "class_literal":
            return Literal(_text(node))
        if t == "parenthesized_expression":
            inner = [self.expr(c, bound_to) for c in node.named_children]
            return Compound("()", tuple(e for e in inner if e is not None))
        if t == "cast_expression":
            value = self.expr(node.child_by_field_name("value"), bound_to)
            return Compound("cast", (value,) if value else (), _text(node.child_by_field_name("type")))
        if t == "field_access":
            target = self.expr(node.child_by_field_name("object"))
            return FieldAccess(target, _text(node.child_by_field_name("field")))
        if t == "method_invocation":
            obj_node = node.child_by_field_name("object")
            recv = self.expr(obj_node)
            args = self._args(node.child_by_field_name("arguments"))
            return CallExpr(
                callee_name=_text(node.child_by_field_name("name")),
                receiver=dotted_name(recv),
                receiver_expr=recv,
                args=args,
                line=_line(node),
                bound_to=bound_to,
            )
        if t == "object_creation_expression":
            args = self._args(node.child_by_field_name("arguments"))
            return CallExpr(
                callee_name=erase(_text(node.child_by_field_name("type"))) or "",
                receiver=None,
                receiver_expr=None,
                args=args,
                line=_line(node),
                is_constructor=True,
                bound_to=bound_to,
            )
        if t == "assignment_expression":
            op = _text(node.child_by_field_name("operator"))
            left = self.expr(node.child_by_field_name("left"))
            right = self.expr(node.child_by_field_name("right"))
            return Compound(op, tuple(e for e in (left, right) if e is not None))
        if t == "update_expression":
            op = "++" if "++" in _text(node) else "--"
            return Compound(op, tuple(e for e in (self.expr(c) for c in node.named_children) if e))
        if t in ("binary_expression", "unary_expression"):
            op = _text(node.child_by_field_name("operator"))
            parts = tuple(e for e in (self.expr(c) for c in node.named_children) if e is not None)
            return Compound(op or t, parts)
        if t == "lambda_expression":
            body = node.child_by_field_name("body")
            if body is not None and body.type == "block":
                parts = []
                for stmt in self.block(body):
                    for s in iter_statements((stmt,)):
                        if s.expr is not None:
                            parts.append(s.expr)
                return Compound("lambda", tuple(parts))
            inner = self.expr(body)
            return Compound("lambda", (inner,) if inner else ())
        parts = tuple(e for e in (self.expr(c) for c in node.named_children) if e is not None)
        op = {
            "ternary_expression": "ternary",
            "array_access": "index",
            "array_creation_expression": "array",
            "array_initializer": "array",
            "instanceof_expression": "instanceof",
            "method_reference": "methodref",
        }.get(t, t)
        return Compound(op, parts)

    def _args(self, node: Optional[Node]) -> tuple[Expr, ...]:
        if node is None:
            return ()
        return tuple(e for e in (self.expr(c) for c in node.named_children) if e is not None)

    # statements ----------------------------------------------------------

    def block(self, node: Optional[Node]) -> tuple[Stmt, ...]:
        if node is None:
            return ()
        if node.type not in ("block", "constructor_body", "switch_block", "switch_block_statement_group"):
            return tuple(self.stmt(node))
        out: list[Stmt] = []
        for child in node.named_children:
            out.extend(self.stmt(child))
        return tuple(out)

    def _mk(self, kind: str, node: Node, expr: Optional[Expr] = None, **kw) -> Stmt:
        return Stmt(
            kind=kind,
            calls=tuple(iter_calls(expr)),
            source_span=(_line(node), node.end_point[0] + 1),
            expr=expr,
            **kw,
        )

    def is_assertion(self, expr: Optional[Expr]) -> bool:
        return is_assertion_call(expr, self.assertion_apis)

    def stmt(self, node: Node) -> list[Stmt]:
        t = node.type
        if t in ("line_comment", "block_comment", ";"):
            return []
        if t == "local_variable_declaration":
            type_name = _text(node.child_by_field_name("type"))
            out = []
            for decl in node.children_by_field_name("declarator"):
                var = _text(decl.child_by_field_name("name"))
                value = self.expr(decl.child_by_field_name("value"), bound_to=var)
                out.append(self._mk("local-decl", node, value, assigned_var=var, declared_type=type_name))
            return out
        if t == "expression_statement":
            inner = node.named_children[0] if node.named_children else None
            assigned = None
            if inner is not None and inner.type == "assignment_expression":
                left = inner.child_by_field_name("left")
                lhs = self.expr(left)
                if isinstance(lhs, Name):
                    assigned = lhs.name
                expr = Compound(
                    _text(inner.child_by_field_name("operator")),
                    tuple(e for e in (lhs, self.expr(inner.child_by_field_name("right"), bound_to=assigned)) if e),
                )
            else:
                expr = self.expr(inner)
            kind = "assert-call" if self.is_assertion(expr) else "expression"
            return [self._mk(kind, node, expr, assigned_var=assigned)]
        if t == "return_statement":
            inner = node.named_children[0] if node.named_children else None
            return [self._mk("return", node, self.expr(inner))]
        if t in CONTROL_NODES:
            return [self._control(node)]
        if t == "explicit_constructor_invocation":
            args = self._args(node.child_by_field_name("arguments"))
            return [self._mk("other", node, Compound("this-call", args))]
        if t in ("throw_statement", "assert_statement", "yield_statement"):
            parts = tuple(e for e in (self.expr(c) for c in node.named_children) if e is not None)
            return [self._mk("other", node, Compound(t, parts))]
        return [self._mk("other", node, None)]

    def _control(self, node: Node) -> Stmt:
        t = node.type
        headers: list[Expr] = []
        children: list[Stmt] = []
        assigned = declared = None
        if t == "block":
            return Stmt("control", (), (_line(node), node.end_point[0] + 1), None, children=self.block(node))
        if t == "enhanced_for_statement":
            assigned = _text(node.child_by_field_name("name"))
            declared = _text(node.child_by_field_name("type"))
            value = self.expr(node.child_by_field_name("value"))
            if value is not None:
                headers.append(value)
            children.extend(self.block(node.child_by_field_name("body")))
            node_children: list[Node] = []
        else:
            node_children = list(node.named_children)
        for child in node_children:
            ct = child.type
            if ct == "block":
                children.extend(self.block(child))
            elif ct.endswith("_statement") or ct in ("local_variable_declaration", "expression_statement"):
                children.extend(self.stmt(child))
            elif ct in ("catch_clause", "finally_clause"):
                param = next((c for c in child.named_children if c.type == "catch_formal_parameter"), None)
                if param is not None and param.child_by_field_name("name") is not None:
                    ctype = next((c for c in param.named_children if c.type == "catch_type"), None)
                    children.append(self._mk("local-decl", param, None, assigned_var=_text(param.child_by_field_name("name")),
                                             declared_type=_text(ctype).split("|")[0].strip() if ctype else "Exception"))
                body = child.child_by_field_name("body") or next((c for c in child.named_children if c.type == "block"), None)
                children.extend(self.block(body))
            elif ct == "resource_specification":
                for res in child.named_children:
                    if res.type != "resource":
                        continue
                    name = res.child_by_field_name("name")
                    value = res.child_by_field_name("value")
                    if name is not None:
                        var = _text(name)
                        children.append(
                            self._mk("local-decl", res, self.expr(value, bound_to=var), assigned_var=var,
                                     declared_type=_text(res.child_by_field_name("type")))
                        )
                    elif res.named_children:
                        children.append(self._mk("expression", res, self.expr(res.named_children[0])))
            elif ct == "switch_block":
                for group in child.named_children:
                    for s in group.named_children:
                        if s.type == "switch_label":
                            continue
                        if s.type in ("block",):
                            children.extend(self.block(s))
                        elif s.type.endswith("_statement") or s.type == "local_variable_declaration":
                            children.extend(self.stmt(s))
                        else:
                            e = self.expr(s)
                            if e is not None:
                                children.append(self._mk("expression", s, e))
            elif ct in ("line_comment", "block_comment", "identifier") and t == "labeled_statement":
                continue
            elif ct in ("line_comment", "block_comment"):
                continue
            else:
                e = self.expr(child)
                if e is not None:
                    headers.append(e)
        header = Compound("control", tuple(headers)) if headers else None
        return Stmt(
            kind="control",
            calls=tuple(iter_calls(header)),
            source_span=(_line(node), node.end_point[0] + 1),
            expr=header,
            assigned_var=assigned,
            declared_type=declared,
            children=tuple(children),
        )

    # declarations --------------------------------------------------------

    def modifiers(self, node: Node) -> tuple[tuple[str, ...], tuple[str, ...], Optional[str]]:
        mods: list[str] = []
        annotations: list[str] = []
        expected = None
        for child in node.children:
            if child.type != "modifiers":
                continue
            for m in child.children:
                if m.type in ("marker_annotation", "annotation"):
                    name = _text(m.child_by_field_name("name")).rsplit(".", 1)[-1]
                    annotations.append(name)
                    args = m.child_by_field_name("arguments")
                    if name == "Test" and args is not None:
                        for pair in args.named_children:
                            if pair.type == "element_value_pair" and _text(pair.child_by_field_name("key")) == "expected":
                                expected = _text(pair.child_by_field_name("value")).removesuffix(".class")
                else:
                    mods.append(_text(m))
        return tuple(mods), tuple(annotations), expected

    def params(self, node: Optional[Node]) -> tuple[tuple[str, str], ...]:
        if node is None:
            return ()
        out = []
        for p in node.named_children:
            if p.type == "formal_parameter":
                out.append((_text(p.child_by_field_name("name")), erase(_text(p.child_by_field_name("type"))) or ""))
            elif p.type == "spread_parameter":
                type_node = next((c for c in p.named_children if c.type not in ("modifiers", "variable_declarator")), None)
                decl = next((c for c in p.named_children if c.type == "variable_declarator"), None)
                name = _text(decl.child_by_field_name("name")) if decl is not None else "args"
                out.append((name, (erase(_text(type_node)) or "") + "..."))
        return tuple(out)

    def type_decl(self, node: Node, package: str, outer: Optional[str], tag: str, file: str, imports: tuple[str, ...]) -> list[TypeDecl]:
        name = _text(node.child_by_field_name("name"))
        qname = f"{outer}.{name}" if outer else (f"{package}.{name}" if package else name)
        kind = node.type.removesuffix("_declaration")
        supertypes: list[str] = []
        for fld in ("superclass", "interfaces"):
            sup = node.child_by_field_name(fld)
            if sup is None:
                continue
            for c in _walk(sup):
                if c.type in ("type_identifier", "scoped_type_identifier") and c.parent.type != "type_arguments" and c.parent.type != "scoped_type_identifier":
                    supertypes.append(erase(_text(c)))
        if node.type == "interface_declaration":
            ext = next((c for c in node.named_children if c.type == "extends_interfaces"), None)
            if ext is not None:
                for c in _walk(ext):
                    if c.type == "type_identifier" and c.parent.type == "type_list":
                        supertypes.append(_text(c))
        body = node.child_by_field_name("body")
        fields: list[FieldDecl] = []
        methods: list[MethodDecl] = []
        nested: list[TypeDecl] = []
        members = list(body.named_children) if body is not None else []
        if body is not None and body.type == "enum_body":
            decls = next((c for c in body.named_children if c.type == "enum_body_declarations"), None)
            members = list(decls.named_children) if decls is not None else []
        for member in members:
            mt = member.type
            if mt == "field_declaration" or mt == "constant_declaration":
                mods, _, _ = self.modifiers(member)
                ftype = _text(member.child_by_field_name("type"))
                for decl in member.children_by_field_name("declarator"):
                    fields.append(
                        FieldDecl(
                            name=_text(decl.child_by_field_name("name")),
                            type_name=erase(ftype) or ftype,
                            is_static="static" in mods or node.type == "interface_declaration",
                            initializer=self.expr(decl.child_by_field_name("value")),
                        )
                    )
            elif mt in ("method_declaration", "constructor_declaration"):
                mods, annotations, expected = self.modifiers(member)
                is_ctor = mt == "constructor_declaration"
                body_node = member.child_by_field_name("body")
                rtype = name if is_ctor else _text(member.child_by_field_name("type"))
                methods.append(
                    MethodDecl(
                        name=_text(member.child_by_field_name("name")),
                        declaring_type=qname,
                        is_constructor=is_ctor,
                        is_static="static" in mods,
                        params=self.params(member.child_by_field_name("parameters")),
                        return_type=None if rtype == "void" else erase(rtype),
                        body=self.block(body_node) if body_node is not None else None,
                        annotations=annotations,
                        modifiers=mods,
                        span=(_line(member), member.end_point[0] + 1),
                        expected_exception=expected,
                    )
                )
            elif mt in ("class_declaration", "interface_declaration", "enum_declaration", "record_declaration"):
                nested.extend(self.type_decl(member, package, qname, tag, file, imports))
        is_test = tag == "test" and any(
            "Test" in m.annotations or _junit3_test(m, supertypes) for m in methods
        )
        decl = TypeDecl(
            qualified_name=qname,
            kind=kind,
            fields=tuple(fields),
            methods=tuple(methods),
            supertypes=tuple(supertypes),
            is_test_class=is_test,
            root_tag=tag,
            file=file,
            imports=imports,
        )
        return [decl, *nested]


def _walk(node: Node) -> Iterator[Node]:
    yield node
    for c in node.named_children:
        yield from _walk(c)


def _junit3_test(m: MethodDecl, supertypes: Iterable[str]) -> bool:
    return (
        any(s.rsplit(".", 1)[-1] == "TestCase" for s in supertypes)
        and m.name.startswith("test")
        and "public" in m.modifiers
        and m.return_type is None
        and not m.params
        and not m.is_static
        and not m.is_constructor
    )


def _syntax_error_line(node: Node) -> Optional[int]:
    if node.type == "ERROR" or node.is_missing:
        return _line(node)
    if not node.has_error:
        return None
    for c in node.children:
        line = _syntax_error_line(c)
        if line is not None:
            return line
    return _line(node)


def parse_compilation_unit(
    source: str,
    tag: str = "production",
    file: str = "<memory>",
    assertion_apis: Iterable[str] = DEFAULT_ASSERTION_APIS,
) -> list[TypeDecl]:
    """Parse one Java source text. Raises SyntaxError on malformed input."""
    parser = Parser(JAVA)
    tree = parser.parse(source.encode("utf-8"))
    root = tree.root_node
    if root.has_error:
        line = _syntax_error_line(root)
        raise SyntaxError(f"{file}:{line}: unparseable Java source")
    builder = _Builder(assertion_apis)
    package = ""
    imports: list[str] = []
    types: list[TypeDecl] = []
    for child in root.named_children:
        if child.type == "package_declaration":
            package = _text(next(c for c in child.named_children if c.type in ("scoped_identifier", "identifier")))
        elif child.type == "import_declaration":
            parts = [_text(c) for c in child.named_children if c.type in ("scoped_identifier", "identifier")]
            star = any(c.type == "asterisk" for c in child.named_children)
            if parts:
                imports.append(parts[0] + (".*" if star else ""))
        elif child.type in ("class_declaration", "interface_declaration", "enum_declaration", "record_declaration"):
            types.extend(builder.type_decl(child, package, None, tag, file, tuple(imports)))
    return types


def parse_sources(
    roots: Iterable[tuple[Union[str, Path], str]],
    assertion_apis: Iterable[str] = DEFAULT_ASSERTION_APIS,
) -> CodeModel:
    """Parse every ``.java`` file under each ``(path, tag)`` root.

    Tags are ``test``, ``production`` or ``external``. A missing root is a
    hard error; a file that fails to parse is skipped with a diagnostic.
    Files are visited in sorted path order so the model is deterministic.
    """
    types: list[TypeDecl] = []
    diagnostics: list[Diagnostic] = []
    seen: set[str] = set()
    tagged: list[tuple[str, str]] = []
    for root, tag in roots:
        if tag not in ROOT_TAGS:
            raise ValueError(f"unknown root tag {tag!r}")
        path = Path(root)
        if not path.exists():
            raise JavaModelError(f"source root does not exist: {path}")
        tagged.append((str(root), tag))
        files = [path] if path.is_file() else sorted(path.rglob("*.java"))
        for f in files:
            try:
                text = f.read_text(encoding="utf-8")
            except OSError as exc:
                raise JavaModelError(f"cannot read {f}: {exc}") from exc
            try:
                unit = parse_compilation_unit(text, tag, str(f), assertion_apis)
            except SyntaxError as exc:
                logger.warning("%s", exc)
                diagnostics.append(Diagnostic(str(f), str(exc)))
                continue
            for t in unit:
                if t.qualified_name in seen:
                    diagnostics.append(Diagnostic(str(f), f"duplicate type {t.qualified_name} ignored"))
                    continue
                seen.add(t.qualified_name)
                types.append(t)
    return CodeModel(types=tuple(types), source_roots=tuple(tagged), diagnostics=tuple(diagnostics))


# --------------------------------------------------------------------------
# Test cases


_AFFIXES = re.compile(r"^(?:Test)?(?P<base>.+?)(?:TestCase|Tests|Test|IT)?$")


def _framework(t: TypeDecl, m: MethodDecl) -> Optional[str]:
    if "Test" in m.annotations:
        jupiter = any(i.startswith("org.junit.jupiter") for i in t.imports)
        return "junit5" if jupiter else "junit4"
    if _junit3_test(m, t.supertypes):
        return "junit3"
    return None


def infer_cut(model: CodeModel, test_class: TypeDecl) -> tuple[Optional[str], str]:
    """Guess the class under test for ``test_class``.

    Returns ``(qualified name or None, how it was found)``.
    """
    production = [t for t in model.types if t.root_tag == "production"]
    m = _AFFIXES.match(test_class.name)
    base = m.group("base") if m else test_class.name
    named = [t for t in production if t.name == base]
    if len(named) == 1:
        return named[0].qualified_name, "name"
    if len(named) > 1:
        same_pkg = [t for t in named if t.package == test_class.package]
        if len(same_pkg) == 1:
            return same_pkg[0].qualified_name, "name+package"

    counts: dict[str, int] = {}
    for method in test_class.methods:
        scope = Scope.for_method(model, test_class, method)
        for stmt in iter_statements(method.body or ()):
            for call in stmt.calls:
                target = None
                if call.is_constructor:
                    target = model.find_type(call.callee_name, test_class)
                elif isinstance(call.receiver_expr, (Name, FieldAccess)) and not _is_value(call.receiver_expr, scope):
                    target = model.find_type(call.receiver, test_class)
                if target is not None and target.root_tag == "production":
                    counts[target.qualified_name] = counts.get(target.qualified_name, 0) + 1
    if not counts:
        return None, "unresolved"
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    if len(ranked) > 1 and ranked[0][1] == ranked[1][1]:
        return None, "ambiguous"
    return ranked[0][0], "usage"


def extract_test_cases(model: CodeModel) -> list[TestCase]:
    """Every JUnit 3/4/5 test method in test-tagged types, in file then source order."""
    out: list[TestCase] = []
    for t in model.types:
        if t.root_tag != "test":
            continue
        tests = [(m, fw) for m in t.methods if (fw := _framework(t, m)) is not None]
        if not tests:
            continue
        cut, how = infer_cut(model, t)
        for m, fw in tests:
            out.append(TestCase(t.qualified_name, m, cut, fw, t.file, how))
    out.sort(key=lambda tc: (tc.file, tc.owning_class, tc.method.name, tc.method.span[0]))
    return out
