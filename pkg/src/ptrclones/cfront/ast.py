"""Syntax tree types for the supported C subset."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Optional


class NodeKind(enum.IntEnum):
    """Closed catalog of node kinds.

    The integer value is the dimension index used by feature vectors, so the
    declaration order here is significant.
    """

    ID = 0
    Constant = 1
    ArrayRef = 2
    Assignment = 3
    StructRef = 4
    BinaryOp = 5
    UnaryOp = 6
    Compound = 7
    For = 8
    While = 9
    If = 10
    Switch = 11
    Case = 12
    Call = 13
    Return = 14
    Decl = 15
    FuncDef = 16
    Param = 17
    Deref = 18
    AddressOf = 19
    Cast = 20
    TernaryOp = 21
    Break = 22
    Continue = 23


CONTROL_KINDS = frozenset(
    {NodeKind.For, NodeKind.While, NodeKind.If, NodeKind.Switch, NodeKind.Case}
)


@dataclass(frozen=True)
class SourceLocation:
    file: str
    line_begin: int
    line_end: int
    col_begin: int
    col_end: int

    def __post_init__(self):
        if self.line_begin > self.line_end or (
            self.line_begin == self.line_end and self.col_begin > self.col_end
        ):
            raise ValueError(f"inverted source span: {self}")

    def contains(self, other: "SourceLocation") -> bool:
        start = (self.line_begin, self.col_begin) <= (other.line_begin, other.col_begin)
        end = (other.line_end, other.col_end) <= (self.line_end, self.col_end)
        return start and end

    @staticmethod
    def span(first: "SourceLocation", last: "SourceLocation") -> "SourceLocation":
        return SourceLocation(
            first.file, first.line_begin, last.line_end, first.col_begin, last.col_end
        )


@dataclass(eq=False)
class AstNode:
    """One syntax tree node.

    ``label`` names the node's role inside its parent (``init``, ``cond``,
    ``next``, ``body``, ``then``, ``else``, ``index`` ...) and ``ctype`` holds
    the declared type text for Decl, Param and Cast nodes. Trees are treated as
    immutable once :func:`number_tree` has assigned ``node_id``.
    """

    kind: NodeKind
    children: tuple["AstNode", ...]
    loc: SourceLocation
    token: Optional[str] = None
    label: Optional[str] = None
    ctype: Optional[str] = None
    node_id: int = -1

    def child(self, label: str) -> Optional["AstNode"]:
        for c in self.children:
            if c.label == label:
                return c
        return None

    def walk(self) -> Iterator["AstNode"]:
        """Pre-order iteration over the subtree."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def __len__(self) -> int:
        return sum(1 for _ in self.walk())

    def __repr__(self) -> str:
        tok = f" {self.token!r}" if self.token is not None else ""
        return f"<{self.kind.name}{tok} #{self.node_id} L{self.loc.line_begin}>"


@dataclass(frozen=True)
class ParamInfo:
    name: Optional[str]
    ctype: str
    is_pointer: bool
    loc: SourceLocation


@dataclass
class FunctionDef:
    name: str
    params: list[ParamInfo]
    body: AstNode
    loc: SourceLocation
    return_type: str = "int"
    node: Optional[AstNode] = field(default=None, repr=False)


@dataclass(frozen=True)
class GlobalDecl:
    name: str
    ctype: str
    is_pointer: bool
    loc: SourceLocation


@dataclass(frozen=True)
class StructMember:
    struct: str
    name: str
    ctype: str
    is_pointer: bool
    loc: SourceLocation


@dataclass
class TranslationUnit:
    filename: str
    functions: list[FunctionDef] = field(default_factory=list)
    globals: list[GlobalDecl] = field(default_factory=list)
    members: list[StructMember] = field(default_factory=list)
    typedefs: set[str] = field(default_factory=set)
    skipped: list[Exception] = field(default_factory=list)
    line_count: int = 0


def post_order(node: AstNode) -> list[tuple[NodeKind, int]]:
    """Children before parents, left to right."""
    out: list[tuple[NodeKind, int]] = []
    stack: list[tuple[AstNode, bool]] = [(node, False)]
    while stack:
        cur, expanded = stack.pop()
        if expanded:
            out.append((cur.kind, cur.node_id))
            continue
        stack.append((cur, True))
        for c in reversed(cur.children):
            stack.append((c, False))
    return out


def post_order_nodes(node: AstNode) -> list[AstNode]:
    out: list[AstNode] = []
    stack: list[tuple[AstNode, bool]] = [(node, False)]
    while stack:
        cur, expanded = stack.pop()
        if expanded:
            out.append(cur)
            continue
        stack.append((cur, True))
        for c in reversed(cur.children):
            stack.append((c, False))
    return out


def number_tree(root: AstNode, start: int = 0) -> int:
    """Assign post-order ids in place; returns the next free id."""
    nid = start
    for node in post_order_nodes(root):
        node.node_id = nid
        nid += 1
    return nid


def kind_sequence(node: AstNode) -> list[NodeKind]:
    return [k for k, _ in post_order(node)]


@dataclass(frozen=True)
class StatementEntry:
    node: AstNode
    control: Optional[AstNode]

    @property
    def is_control(self) -> bool:
        return self.node.kind in CONTROL_KINDS


def _body_statements(node: AstNode) -> list[AstNode]:
    """Statements that sit directly under a control construct or block."""
    if node.kind == NodeKind.Compound:
        out = []
        for c in node.children:
            out.extend(_body_statements(c))
        return out
    return [node]


def control_bodies(node: AstNode) -> list[AstNode]:
    """Child subtrees of a control construct that hold statements."""
    if node.kind in (NodeKind.For, NodeKind.While):
        body = node.child("body")
        return [body] if body is not None else []
    if node.kind == NodeKind.If:
        return [c for c in node.children if c.label in ("then", "else")]
    if node.kind == NodeKind.Switch:
        body = node.child("body")
        return [body] if body is not None else []
    if node.kind == NodeKind.Case:
        return [c for c in node.children if c.label == "stmt"]
    return []


def header_children(node: AstNode) -> list[AstNode]:
    """Non-statement children of a control construct (conditions, init, step)."""
    bodies = {id(b) for b in control_bodies(node)}
    return [c for c in node.children if id(c) not in bodies]


def subtree_statements(body: AstNode) -> list[StatementEntry]:
    """Flatten a function body into statements tagged with their control parent.

    Compound blocks are transparent: they never appear as entries themselves.
    """
    if body.kind != NodeKind.Compound:
        raise ValueError("subtree_statements expects a Compound body")
    out: list[StatementEntry] = []

    def visit(stmts: list[AstNode], control: Optional[AstNode]):
        for s in stmts:
            out.append(StatementEntry(s, control))
            if s.kind in CONTROL_KINDS:
                for b in control_bodies(s):
                    visit(_body_statements(b), s)

    visit(_body_statements(body), None)
    return out
