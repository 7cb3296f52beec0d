"""Pointer selection, per-function dependency graphs and lightweight tainting."""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .cfront import AstNode, FunctionDef, GlobalDecl, NodeKind, SourceLocation, StructMember
from .cfront.pretty import expr_to_c

EDGE_KINDS = ("assignment", "array_index", "call_param", "loop_bound")
ROLES = ("index", "bound", "base_alias", "length_source", "other")
_ROLE_RANK = {"index": 0, "length_source": 1, "bound": 2, "base_alias": 3, "other": 4}
RELATIONAL_OPS = frozenset({"<", "<=", ">", ">=", "==", "!="})
LENGTH_CALLS = frozenset({"strlen", "strnlen", "wcslen", "sizeof", "length", "len", "size", "count"})


class TargetNotUsed(Exception):
    pass


@dataclass(frozen=True)
class PointerRecord:
    name: str
    decl_kind: str  # global | local | struct_member | param
    owning_function: Optional[str]
    decl_loc: SourceLocation

    def __post_init__(self):
        if not self.name:
            raise ValueError("pointer name must be non-empty")
        if self.decl_kind == "param" and not self.owning_function:
            raise ValueError("parameter pointers need an owning function")


@dataclass
class DependencyGraph:
    function: str
    nodes: set[str] = field(default_factory=set)
    edges: set[tuple[str, str, str]] = field(default_factory=set)
    first_use: dict[str, tuple[int, int]] = field(default_factory=dict)
    aliases: set[tuple[str, str]] = field(default_factory=set)

    def add_edge(self, src: str, dst: str, kind: str):
        if src == dst:
            return
        self.nodes.update((src, dst))
        self.edges.add((src, dst, kind))

    def successors(self) -> dict[str, set[str]]:
        out: dict[str, set[str]] = defaultdict(set)
        for a, b, _ in self.edges:
            out[a].add(b)
        return out

    def predecessors(self) -> dict[str, set[str]]:
        out: dict[str, set[str]] = defaultdict(set)
        for a, b, _ in self.edges:
            out[b].add(a)
        return out

    def dump(self) -> str:
        """Edge list, one ``from -> to [kind]`` per line."""
        return "".join(f"{a} -> {b} [{k}]\n" for a, b, k in sorted(self.edges))


@dataclass
class PointerRelatedVars:
    pointer: PointerRecord
    vars: list[str]
    roles: dict[str, str]
    index_depth: dict[str, int] = field(default_factory=dict)

    def __contains__(self, name: str) -> bool:
        return name in self.roles


# expression helpers ----------------------------------------------------------


def path_of(node: AstNode) -> Optional[str]:
    """Identifier path of an ID/StructRef chain (``mdef->sseq``), else None."""
    if node.kind == NodeKind.ID:
        return node.token
    if node.kind == NodeKind.StructRef:
        base, fld = node.children
        base_path = path_of(base)
        if base_path is None:
            base_path = expr_to_c(base)
        return f"{base_path}{node.token}{fld.token}"
    return None


def pointer_root(node: AstNode) -> Optional[str]:
    """Path of the pointer an ArrayRef/Deref chain ultimately addresses."""
    while node.kind in (NodeKind.ArrayRef, NodeKind.Deref, NodeKind.Cast):
        node = node.children[0]
    return path_of(node)


def base_chain(path: str) -> list[str]:
    """``a->b.c`` -> [``a->b``, ``a``]."""
    out = []
    cur = path
    while True:
        cut = max(cur.rfind("->"), cur.rfind("."))
        if cut <= 0:
            return out
        cur = cur[:cut]
        out.append(cur)


def root_name(path: str) -> str:
    chain = base_chain(path)
    return chain[-1] if chain else path


def call_name(node: AstNode) -> str:
    return expr_to_c(node)


def value_sources(node: AstNode) -> list[str]:
    """Paths (and value-producing call expressions) whose values flow into ``node``."""
    k = node.kind
    if k == NodeKind.ID:
        return [node.token]
    if k == NodeKind.StructRef:
        return [path_of(node)]
    if k == NodeKind.Constant:
        return []
    if k == NodeKind.ArrayRef:
        return value_sources(node.child("base"))
    if k == NodeKind.Call:
        return [call_name(node)]
    if k == NodeKind.UnaryOp and node.token == "sizeof":
        return []
    if k in (NodeKind.Deref, NodeKind.AddressOf, NodeKind.Cast, NodeKind.UnaryOp):
        return value_sources(node.children[0])
    if k == NodeKind.BinaryOp:
        left, right = node.children
        if node.token == ",":
            return value_sources(right)
        return value_sources(left) + value_sources(right)
    if k == NodeKind.TernaryOp:
        return value_sources(node.child("then")) + value_sources(node.child("else"))
    if k == NodeKind.Assignment:
        return [p for p in [assign_target(node.child("lhs"))[0]] if p]
    return []


def mentioned_paths(node: AstNode) -> list[str]:
    """Every identifier path and value-used call occurring in ``node``."""
    out: list[str] = []

    def visit(n: AstNode):
        p = path_of(n)
        if p is not None:
            out.append(p)
            if n.kind == NodeKind.StructRef:
                visit_base(n.children[0])
            return
        if n.kind == NodeKind.Call:
            out.append(call_name(n))
            for a in n.children[1:]:
                visit(a)
            return
        for c in n.children:
            visit(c)

    def visit_base(n: AstNode):
        if n.kind in (NodeKind.ID, NodeKind.StructRef):
            return
        visit(n)

    visit(node)
    return out


def assign_target(lhs: AstNode) -> tuple[Optional[str], bool]:
    """(path written, written-through-pointer?)"""
    p = path_of(lhs)
    if p is not None:
        return p, False
    return pointer_root(lhs), True


def iter_expressions(fn_body: AstNode) -> Iterable[tuple[AstNode, bool]]:
    """Yield every expression-level node with a flag telling whether its value is used."""

    def expr_nodes(e: AstNode, used: bool):
        yield e, used
        if e.kind == NodeKind.BinaryOp and e.token == ",":
            left, right = e.children
            yield from expr_nodes(left, False)
            yield from expr_nodes(right, used)
            return
        for c in e.children:
            yield from expr_nodes(c, True)

    def stmt(s: AstNode):
        k = s.kind
        if k == NodeKind.Compound:
            for c in s.children:
                yield from stmt(c)
        elif k in (NodeKind.For, NodeKind.While, NodeKind.If, NodeKind.Switch, NodeKind.Case):
            for c in s.children:
                if c.label in ("body", "then", "else", "stmt"):
                    yield from stmt(c)
                elif c.label in ("init", "next"):
                    if c.kind == NodeKind.Decl:
                        yield from stmt(c)
                    else:
                        yield from expr_nodes(c, False)
                else:
                    yield from expr_nodes(c, True)
        elif k == NodeKind.Decl:
            yield s, True
            for c in s.children:
                yield from expr_nodes(c, True)
        elif k == NodeKind.Return:
            for c in s.children:
                yield from expr_nodes(c, True)
        elif k in (NodeKind.Break, NodeKind.Continue):
            return
        else:
            yield from expr_nodes(s, False)

    yield from stmt(fn_body)


def _relationals(cond: AstNode) -> list[AstNode]:
    if cond.kind == NodeKind.BinaryOp and cond.token in ("&&", "||", ","):
        return _relationals(cond.children[0]) + _relationals(cond.children[1])
    if cond.kind == NodeKind.UnaryOp and cond.token == "!":
        return _relationals(cond.children[0])
    if cond.kind == NodeKind.BinaryOp and cond.token in RELATIONAL_OPS:
        return [cond]
    return []


def _assigned_paths(node: Optional[AstNode]) -> set[str]:
    out: set[str] = set()
    if node is None:
        return out
    for n in node.walk():
        if n.kind == NodeKind.Assignment:
            p, through = assign_target(n.child("lhs"))
            if p and not through:
                out.add(p)
        elif n.kind == NodeKind.UnaryOp and n.token in ("++", "--", "p++", "p--"):
            p = path_of(n.children[0])
            if p:
                out.add(p)
        elif n.kind == NodeKind.Decl:
            out.add(n.token)
    return out


# operations --------------------------------------------------------------------


def _uses_in(fn: FunctionDef) -> dict[str, SourceLocation]:
    first: dict[str, SourceLocation] = {}
    for n in fn.body.walk():
        p = path_of(n)
        if p is not None and p not in first:
            first[p] = n.loc
        if n.kind == NodeKind.Decl and n.token not in first:
            first[n.token] = n.loc
    return first


def _indexed_or_derefed(fn: FunctionDef) -> set[str]:
    out: set[str] = set()
    for n in fn.body.walk():
        if n.kind in (NodeKind.ArrayRef, NodeKind.Deref):
            root = pointer_root(n)
            if root:
                out.add(root)
    return out


def select_pointers(
    functions: Sequence[FunctionDef],
    globals: Sequence[GlobalDecl] = (),
    members: Sequence[StructMember] = (),
) -> list[PointerRecord]:
    """Every pointer/array variable, pointer-typed parameter and pointer-like
    struct member used in the given functions, ordered by (file, line)."""
    records: list[PointerRecord] = []
    pointer_members = {m.name: m for m in members if m.is_pointer}
    global_names = {g.name: g for g in globals if g.is_pointer}
    used_globals: set[str] = set()
    for fn in functions:
        uses = _uses_in(fn)
        derefed = _indexed_or_derefed(fn)
        for p in fn.params:
            if p.is_pointer and p.name:
                records.append(PointerRecord(p.name, "param", fn.name, p.loc))
        for n in fn.body.walk():
            if n.kind == NodeKind.Decl and ("*" in (n.ctype or "") or n.child("dim") is not None):
                records.append(PointerRecord(n.token, "local", fn.name, n.loc))
        local_names = {p.name for p in fn.params} | {
            n.token for n in fn.body.walk() if n.kind == NodeKind.Decl}
        for path, loc in uses.items():
            if ("->" in path or "." in path):
                member = path.rsplit("->", 1)[-1].rsplit(".", 1)[-1]
                if member in pointer_members or path in derefed:
                    decl_loc = pointer_members[member].loc if member in pointer_members else loc
                    records.append(PointerRecord(path, "struct_member", fn.name, decl_loc))
            elif path in global_names and path not in local_names:
                used_globals.add(path)
    for name in sorted(used_globals, key=lambda g: (global_names[g].loc.file, global_names[g].loc.line_begin)):
        records.append(PointerRecord(name, "global", None, global_names[name].loc))
    records.sort(key=lambda r: (r.decl_loc.file, r.decl_loc.line_begin, r.decl_loc.col_begin, r.name))
    seen: set[tuple] = set()
    unique = []
    for r in records:
        key = (r.name, r.owning_function)
        if key not in seen:
            seen.add(key)
            unique.append(r)
    return unique


def uses_target(fn: FunctionDef, target: PointerRecord) -> bool:
    for n in fn.body.walk():
        if path_of(n) == target.name:
            return True
    return False


def build_dependency_graph(fn: FunctionDef, target: PointerRecord, taint_deref_writes: bool = True) -> DependencyGraph:
    """Directed graph of identifier dependencies inside one function."""
    if not uses_target(fn, target):
        raise TargetNotUsed(f"{target.name} is not used in {fn.name}")
    g = DependencyGraph(fn.name)

    def note(path: str, loc: SourceLocation):
        g.nodes.add(path)
        key = (loc.line_begin, loc.col_begin)
        if path not in g.first_use or key < g.first_use[path]:
            g.first_use[path] = key

    for node, used in iter_expressions(fn.body):
        k = node.kind
        p = path_of(node)
        if p is not None:
            note(p, node.loc)
            for b in base_chain(p):
                note(b, node.loc)
        if k == NodeKind.ArrayRef:
            root = pointer_root(node)
            if root:
                for src in mentioned_paths(node.child("index")):
                    g.add_edge(src, root, "array_index")
        elif k == NodeKind.Call and used:
            name = call_name(node)
            note(name, node.loc)
            for arg in node.children[1:]:
                for src in value_sources(arg):
                    g.add_edge(src, name, "call_param")
        elif k == NodeKind.Assignment:
            lhs, rhs = node.child("lhs"), node.child("rhs")
            dst, through = assign_target(lhs)
            if dst and (not through or taint_deref_writes):
                for src in value_sources(rhs):
                    g.add_edge(src, dst, "assignment")
                if not through and path_of(rhs) is not None:
                    g.aliases.add((path_of(rhs), dst))
        elif k == NodeKind.Decl:
            note(node.token, node.loc)
            init = node.child("init")
            if init is not None:
                for src in value_sources(init):
                    g.add_edge(src, node.token, "assignment")
                if path_of(init) is not None:
                    g.aliases.add((path_of(init), node.token))

    for loop in fn.body.walk():
        if loop.kind == NodeKind.For:
            induction = _assigned_paths(loop.child("init")) | _assigned_paths(loop.child("next"))
        elif loop.kind == NodeKind.While:
            induction = _assigned_paths(loop.child("body")) | _assigned_paths(loop.child("cond"))
        else:
            continue
        cond = loop.child("cond")
        if cond is None:
            continue
        for rel in _relationals(cond):
            left, right = rel.children
            for iv_side, bound_side in ((left, right), (right, left)):
                iv = path_of(iv_side)
                if iv in induction:
                    for src in value_sources(bound_side):
                        if src != iv:
                            g.add_edge(src, iv, "loop_bound")
    return g


def _reach(start: str, adj: dict[str, set[str]]) -> set[str]:
    seen = {start}
    stack = [start]
    while stack:
        for nxt in adj.get(stack.pop(), ()):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


def taint_pointer_related(graph: DependencyGraph, target: PointerRecord) -> PointerRelatedVars:
    """Forward and backward closure from the target pointer, confined to the graph's function."""
    fwd = _reach(target.name, graph.successors())
    bwd = _reach(target.name, graph.predecessors())
    tainted = fwd | bwd
    for v in list(tainted):
        tainted.update(base_chain(v))

    index_src = {a for a, b, k in graph.edges if k == "array_index"}
    bound_src = {a for a, b, k in graph.edges if k == "loop_bound"}
    target_root = root_name(target.name)
    struct_bases = {b for v in tainted for b in base_chain(v)}
    aliases = {a for a, b in graph.aliases if b == target.name} | {
        b for a, b in graph.aliases if a == target.name}

    def is_length_source(v: str) -> bool:
        if v == target.name:
            return False
        if "(" in v:
            fname = v.split("(", 1)[0].strip()
            args = v.split("(", 1)[1]
            mentions_target = target.name in args or (
                target_root != target.name and target_root in _identifiers(args))
            return mentions_target and (fname in LENGTH_CALLS or v in bound_src)
        if v in bound_src and target_root != target.name:
            return root_name(v) == target_root and v not in (target_root,)
        return False

    roles: dict[str, str] = {}
    for v in tainted:
        cands = ["other"]
        if v in index_src:
            cands.append("index")
        if is_length_source(v):
            cands.append("length_source")
        if v in bound_src:
            cands.append("bound")
        if v in struct_bases or v in aliases:
            cands.append("base_alias")
        if v == target.name:
            cands = ["other"]
        roles[v] = min(cands, key=_ROLE_RANK.__getitem__)

    def order_key(v: str):
        return (graph.first_use.get(v, (10**9, 10**9)), v)

    ordered = sorted(tainted, key=order_key)
    return PointerRelatedVars(target, ordered, roles)


def _identifiers(text: str) -> set[str]:
    return set(re.findall(r"[A-Za-z_]\w*", text))


def pointer_related_vars(fn: FunctionDef, target: PointerRecord, taint_deref_writes: bool = True) -> PointerRelatedVars:
    graph = build_dependency_graph(fn, target, taint_deref_writes)
    return taint_pointer_related(graph, target)
