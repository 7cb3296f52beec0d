"""Statement-level backward data slicing plus forward control slicing."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from .cfront import (
    CONTROL_KINDS,
    AstNode,
    FunctionDef,
    NodeKind,
    SourceLocation,
    StatementEntry,
    header_children,
    post_order,
    subtree_statements,
)
from .cfront.pretty import stmt_to_c
from .ptranalysis import (
    PointerRecord,
    PointerRelatedVars,
    assign_target,
    mentioned_paths,
    path_of,
    pointer_related_vars,
)


class EmptySlice(Exception):
    pass


_fragment_ids = itertools.count()


@dataclass
class SliceFragment:
    pointer: PointerRecord
    statements: list[AstNode]
    tree: AstNode
    origin: list[SourceLocation]
    fragment_id: int
    function: str = ""

    def __post_init__(self):
        if not self.statements:
            raise ValueError("a fragment needs at least one statement")
        if len(self.origin) != len(self.statements):
            raise ValueError("origin and statements differ in length")

    @property
    def top_level(self) -> tuple[AstNode, ...]:
        return self.tree.children

    def kind_sequence(self) -> list[NodeKind]:
        """Post-order kinds of the kept code, without the synthetic root."""
        out: list[NodeKind] = []
        for stmt in self.tree.children:
            out.extend(k for k, _ in post_order(stmt))
        return out

    def to_c(self) -> str:
        return "".join(stmt_to_c(s) for s in self.tree.children)

    @property
    def key(self) -> tuple:
        return (self.function, tuple(s.node_id for s in self.statements))


def _header_nodes(entry: StatementEntry) -> list[AstNode]:
    if entry.is_control:
        return header_children(entry.node)
    return [entry.node]


def _statement_dependency(parts: Iterable[AstNode], vars_: set[str]) -> bool:
    """Does any part assign a related variable or pass one to a call?"""
    for part in parts:
        for n in part.walk():
            if n.kind == NodeKind.Assignment:
                written, _ = assign_target(n.child("lhs"))
                if written in vars_:
                    return True
            elif n.kind == NodeKind.UnaryOp and n.token in ("++", "--", "p++", "p--"):
                if path_of(n.children[0]) in vars_:
                    return True
            elif n.kind == NodeKind.Decl:
                if n.token in vars_ and n.child("init") is not None:
                    return True
            elif n.kind == NodeKind.Call:
                for arg in n.children[1:]:
                    if any(p in vars_ for p in mentioned_paths(arg)):
                        return True
    return False


def backward_slice(fn: FunctionDef, related: PointerRelatedVars) -> set[int]:
    vars_ = set(related.vars)
    return {
        e.node.node_id
        for e in subtree_statements(fn.body)
        if _statement_dependency(_header_nodes(e), vars_)
    }


def _mentions(parts: Iterable[AstNode], vars_: set[str]) -> bool:
    return any(p in vars_ for part in parts for p in mentioned_paths(part))


def forward_control_slice(fn: FunctionDef, data_slice: set[int], related: PointerRelatedVars) -> set[int]:
    """Control constructs enclosing a data-sliced statement, or whose condition
    mentions a related variable, closed over nesting."""
    if not data_slice:
        return set()
    entries = subtree_statements(fn.body)
    parent = {e.node.node_id: e.control for e in entries}
    vars_ = set(related.vars)
    seeds = set(data_slice)
    for e in entries:
        if e.is_control and _mentions(header_children(e.node), vars_):
            seeds.add(e.node.node_id)
    out: set[int] = set()
    for nid in seeds:
        ctrl = parent.get(nid)
        if nid not in data_slice and nid in parent:
            out.add(nid)
        while ctrl is not None:
            out.add(ctrl.node_id)
            ctrl = parent.get(ctrl.node_id)
    return out - set(data_slice)


def _prune(node: AstNode, keep: set[int]) -> Optional[AstNode]:
    """Copy of ``node`` restricted to kept statements; node ids are preserved."""
    if node.kind == NodeKind.Compound:
        kids = [k for k in (_prune(c, keep) for c in node.children) if k is not None]
        if not kids and node.label not in ("body", "then"):
            return None
        return AstNode(node.kind, tuple(kids), node.loc, node.token, node.label, node.ctype, node.node_id)
    if node.node_id not in keep:
        return None
    if node.kind not in CONTROL_KINDS:
        return node
    kids = []
    for c in node.children:
        if c.label in ("body", "then", "else", "stmt"):
            pruned = _prune(c, keep)
            if pruned is not None:
                kids.append(pruned)
        else:
            kids.append(c)
    return AstNode(node.kind, tuple(kids), node.loc, node.token, node.label, node.ctype, node.node_id)


def build_fragment(fn: FunctionDef, target: PointerRecord, keep: set[int], fragment_id: Optional[int] = None) -> SliceFragment:
    entries = [e for e in subtree_statements(fn.body) if e.node.node_id in keep]
    if not entries:
        raise EmptySlice(f"{target.name} yields no statements in {fn.name}")
    entries.sort(key=lambda e: (e.node.loc.line_begin, e.node.loc.col_begin, e.node.node_id))
    top = [k for k in (_prune(c, keep) for c in fn.body.children) if k is not None]
    # a lone surviving block is flattened into the synthetic root
    flat: list[AstNode] = []
    for t in top:
        if t.kind == NodeKind.Compound and t.label is None:
            flat.extend(t.children)
        else:
            flat.append(t)
    loc = SourceLocation.span(flat[0].loc, flat[-1].loc)
    root = AstNode(NodeKind.Compound, tuple(flat), loc, label="fragment", node_id=fn.body.node_id)
    fid = next(_fragment_ids) if fragment_id is None else fragment_id
    return SliceFragment(target, [e.node for e in entries], root, [e.node.loc for e in entries], fid, fn.name)


def isolate(fn: FunctionDef, target: PointerRecord, related: Optional[PointerRelatedVars] = None,
            fragment_id: Optional[int] = None) -> SliceFragment:
    """Pointer-isolated fragment of ``fn`` for ``target``."""
    if related is None:
        related = pointer_related_vars(fn, target)
    data = backward_slice(fn, related)
    control = forward_control_slice(fn, data, related)
    return build_fragment(fn, target, data | control, fragment_id)


def dedupe(fragments: Iterable[SliceFragment]) -> list[SliceFragment]:
    """Drop fragments that keep exactly the same statements of the same function."""
    seen: set[tuple] = set()
    out = []
    for f in fragments:
        if f.key not in seen:
            seen.add(f.key)
            out.append(f)
    return out


def dump_fragments(fragments: Iterable[SliceFragment], directory: str | Path) -> None:
    """Write ``<id>.c`` with the fragment text and ``<id>.lines`` with original line numbers."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for f in fragments:
        header = f"/* {f.function}: {f.pointer.name} */\n"
        (directory / f"{f.fragment_id}.c").write_text(header + f.to_c())
        lines = "".join(
            f"{o.file}:{o.line_begin}-{o.line_end}\n" for o in f.origin
        )
        (directory / f"{f.fragment_id}.lines").write_text(lines)
