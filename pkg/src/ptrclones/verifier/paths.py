"""Basic-block paths through a fragment and the guard constraints along them."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from ..cfront import AstNode, NodeKind
from ..cfront.pretty import expr_to_c
from ..ptranalysis import PointerRelatedVars, call_name, mentioned_paths, path_of, pointer_root
from ..slicer import SliceFragment
from .constraints import (
    AtomicCondition,
    ConstraintSet,
    LinearTerm,
    PathCondition,
    SymbolicVar,
    canonicalize_atoms,
)

PATH_CAP = 64


class PathExplosion(Exception):
    pass


@dataclass(frozen=True)
class Block:
    kind: str  # loop | then | else | case | default
    node: AstNode
    guard: Optional[AstNode]
    others: tuple[AstNode, ...] = ()  # case labels negated by a default block
    selector: Optional[AstNode] = None

    def describe(self) -> str:
        if self.kind == "case":
            return f"case {expr_to_c(self.selector)} == {expr_to_c(self.guard)}"
        if self.kind == "default":
            return f"default of {expr_to_c(self.selector)}"
        g = expr_to_c(self.guard) if self.guard is not None else "1"
        return f"{self.kind} ({g})"


def _product(left: list[list], right: list[list], cap: int) -> list[list]:
    out = [p + q for p in left for q in right]
    if len(out) > cap:
        raise PathExplosion(f"more than {cap} paths")
    return out


def _seq(stmts, cap: int) -> list[list[Block]]:
    paths: list[list[Block]] = [[]]
    for s in stmts:
        paths = _product(paths, _stmt(s, cap), cap)
    return paths


def _stmt(s: AstNode, cap: int) -> list[list[Block]]:
    k = s.kind
    if k == NodeKind.Compound:
        return _seq(s.children, cap)
    if k in (NodeKind.For, NodeKind.While):
        body = s.child("body")
        inner = _stmt(body, cap) if body is not None else [[]]
        return _product([[Block("loop", s, s.child("cond"))]], inner, cap)
    if k == NodeKind.If:
        cond = s.child("cond")
        then, other = s.child("then"), s.child("else")
        out = _product([[Block("then", s, cond)]], _stmt(then, cap) if then is not None else [[]], cap)
        out += _product([[Block("else", s, cond)]], _stmt(other, cap) if other is not None else [[]], cap)
        if len(out) > cap:
            raise PathExplosion(f"more than {cap} paths")
        return out
    if k == NodeKind.Switch:
        sel = s.child("cond")
        body = s.child("body")
        items = body.children if body is not None and body.kind == NodeKind.Compound else (
            [body] if body is not None else [])
        cases = [c for c in items if c.kind == NodeKind.Case]
        labels = tuple(c.child("expr") for c in cases if c.token != "default")
        out: list[list[Block]] = []
        for c in cases:
            stmts = [x for x in c.children if x.label == "stmt"]
            if c.token == "default":
                head = Block("default", s, None, labels, sel)
            else:
                head = Block("case", s, c.child("expr"), (), sel)
            out += _product([[head]], _seq(stmts, cap), cap)
            if len(out) > cap:
                raise PathExplosion(f"more than {cap} paths")
        return out or [[]]
    return [[]]


def enumerate_paths(fragment, cap: int = PATH_CAP) -> list[list[Block]]:
    """Block sequences through the fragment; loops are entered once, never unrolled."""
    tree = fragment.tree if isinstance(fragment, SliceFragment) else fragment
    return _stmt(tree, cap)


# guards to literals ----------------------------------------------------------

_NEG = {"<": ">=", "<=": ">", ">": "<=", ">=": "<", "==": "!=", "!=": "=="}
_REL = frozenset(_NEG)

Literal = tuple[AstNode, str, Optional[AstNode]]  # rhs None means constant 0


def _dnf(e: AstNode, positive: bool, cap: int) -> list[list[Literal]]:
    if e.kind == NodeKind.BinaryOp and e.token in ("&&", "||"):
        left, right = e.children
        a, b = _dnf(left, positive, cap), _dnf(right, positive, cap)
        conj = (e.token == "&&") == positive
        if conj:
            return _product(a, b, cap)
        out = a + b
        if len(out) > cap:
            raise PathExplosion(f"more than {cap} disjuncts")
        return out
    if e.kind == NodeKind.UnaryOp and e.token == "!":
        return _dnf(e.children[0], not positive, cap)
    if e.kind == NodeKind.BinaryOp and e.token == ",":
        return _dnf(e.children[1], positive, cap)
    if e.kind == NodeKind.Cast:
        return _dnf(e.children[-1], positive, cap)
    if e.kind == NodeKind.BinaryOp and e.token in _REL:
        op = e.token if positive else _NEG[e.token]
        lhs, rhs = e.children
        return _split_ne([(lhs, op, rhs)])
    return _split_ne([(e, "!=" if positive else "==", None)])


def _split_ne(lits: list[Literal]) -> list[list[Literal]]:
    lhs, op, rhs = lits[0]
    if op == "!=":
        return [[(lhs, "<", rhs)], [(lhs, ">", rhs)]]
    return [[(lhs, op, rhs)]]


def _block_dnf(b: Block, cap: int) -> list[list[Literal]]:
    if b.kind == "loop" or b.kind == "then":
        return _dnf(b.guard, True, cap) if b.guard is not None else [[]]
    if b.kind == "else":
        return _dnf(b.guard, False, cap)
    if b.kind == "case":
        return [[(b.selector, "==", b.guard)]]
    # default: selector differs from every label
    out: list[list[Literal]] = [[]]
    for lab in b.others:
        out = _product(out, [[(b.selector, "<", lab)], [(b.selector, ">", lab)]], cap)
    return out


# linearization ---------------------------------------------------------------

_INT_RE = re.compile(r"^(0[xX][0-9a-fA-F]+|0[0-7]*|[1-9][0-9]*)[uUlL]*$")


def _int_value(token: str) -> Optional[int]:
    m = _INT_RE.match(token)
    if m:
        return int(m.group(1), 0) if not re.fullmatch(r"0[0-7]+", m.group(1)) else int(m.group(1), 8)
    if len(token) >= 3 and token[0] == "'" and token[-1] == "'":
        body = token[1:-1]
        escapes = {"\\n": 10, "\\t": 9, "\\0": 0, "\\\\": 92, "\\'": 39, "\\r": 13}
        if body in escapes:
            return escapes[body]
        if len(body) == 1:
            return ord(body)
    return None


class _Extractor:
    def __init__(self, fragment: SliceFragment, related: PointerRelatedVars):
        self.fragment = fragment
        self.related = related
        self.fid = fragment.fragment_id
        self.target = related.pointer.name
        self.order = {v: i for i, v in enumerate(related.vars)}
        self.symbols: dict[str, SymbolicVar] = {}
        self.depth = self._index_depths()
        for v in related.vars:
            self._related_symbol(v)

    def sid(self, origin: str) -> str:
        return f"f{self.fid}:{origin}"

    def _index_depths(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for n in self.fragment.tree.walk():
            if n.kind != NodeKind.ArrayRef or n.label == "base":
                continue
            chain = []
            cur = n
            while cur.kind == NodeKind.ArrayRef:
                chain.append(cur.child("index"))
                cur = cur.child("base")
            if pointer_root(n) != self.target:
                continue
            chain.reverse()
            for d, idx in enumerate(chain):
                for p in mentioned_paths(idx):
                    if self.related.roles.get(p) == "index":
                        out[p] = min(d, out.get(p, d))
        return out

    def _role(self, v: str) -> str:
        if v == self.target:
            return "target"
        r = self.related.roles.get(v, "other")
        if r == "index":
            return "index"
        if r in ("bound", "length_source"):
            return "bound"
        return "scalar"

    def _related_symbol(self, v: str) -> str:
        sid = self.sid(v)
        if sid not in self.symbols:
            role = self._role(v)
            if role == "index":
                rank = (self.depth.get(v, 99), self.order.get(v, 0))
            else:
                rank = (self.order.get(v, 0),)
            self.symbols[sid] = SymbolicVar(sid, v, role, self.fid, rank=rank,
                                            depth=self.depth.get(v) if role == "index" else None)
        return sid

    def _extra_symbol(self, origin: str, role: str, shape: Optional[str] = None,
                      depth: Optional[int] = None) -> str:
        sid = self.sid(origin)
        if sid not in self.symbols:
            rank = (depth if depth is not None else 0, len(self.symbols))
            self.symbols[sid] = SymbolicVar(sid, origin, role, self.fid, pointer=self.target if role == "length_of" else None,
                                            depth=depth, shape=shape, rank=rank)
        return sid

    def _shape(self, node: AstNode) -> str:
        text = expr_to_c(node)
        for p in sorted(set(mentioned_paths(node)), key=len, reverse=True):
            token = f"<{self._role(p)}>" if p in self.related.roles else "<free>"
            text = re.sub(r"(?<![\w.>])" + re.escape(p) + r"(?!\w)", token, text)
        return text

    # returns (term over temporary leaf keys, leaves: key -> (kind, node))
    def _lin(self, e: AstNode, leaves: dict) -> Optional[LinearTerm]:
        k = e.kind
        if k == NodeKind.Constant:
            v = _int_value(e.token or "")
            if v is not None:
                return LinearTerm.constant(v)
            return self._leaf(e, leaves)
        if k in (NodeKind.ID, NodeKind.StructRef):
            return self._leaf(e, leaves)
        if k == NodeKind.Cast:
            return self._lin(e.children[-1], leaves)
        if k == NodeKind.Assignment:
            return self._lin(e.child("lhs"), leaves)
        if k == NodeKind.UnaryOp and e.token in ("-", "+"):
            t = self._lin(e.children[0], leaves)
            return -t if e.token == "-" else t
        if k == NodeKind.UnaryOp and e.token in ("++", "--", "p++", "p--"):
            return self._lin(e.children[0], leaves)
        if k == NodeKind.BinaryOp and e.token in ("+", "-"):
            a = self._lin(e.children[0], leaves)
            b = self._lin(e.children[1], leaves)
            return a + b if e.token == "+" else a - b
        if k == NodeKind.BinaryOp and e.token == "*":
            a = self._lin(e.children[0], leaves)
            b = self._lin(e.children[1], leaves)
            if not a.coeffs:
                return b.scale(a.const)
            if not b.coeffs:
                return a.scale(b.const)
        if k == NodeKind.BinaryOp and e.token == ",":
            return self._lin(e.children[1], leaves)
        return self._leaf(e, leaves)

    def _leaf(self, e: AstNode, leaves: dict) -> LinearTerm:
        p = path_of(e)
        if p is None and e.kind == NodeKind.Call:
            p = call_name(e)
        if p is not None and p in self.related.roles:
            key = ("rel", p)
        elif any(m in self.related.roles for m in mentioned_paths(e)):
            key = ("opaque", expr_to_c(e))
        elif p is not None and e.kind in (NodeKind.ID, NodeKind.StructRef):
            key = ("free", p)
        else:
            key = ("freeop", expr_to_c(e))
        leaves[key] = e
        return LinearTerm.var(repr(key))

    def atom(self, lit: Literal) -> Optional[AtomicCondition]:
        lhs, op, rhs = lit
        leaves: dict = {}
        lt = self._lin(lhs, leaves)
        rt = self._lin(rhs, leaves) if rhs is not None else LinearTerm.constant(0)
        if not any(k[0] in ("rel", "opaque") for k in leaves):
            return None
        # index of the target at depth d against its length source -> length term
        idx_depths = [self.depth[k[1]] for k in leaves if k[0] == "rel" and k[1] in self.depth]
        rename: dict[str, str] = {}
        for key, node in leaves.items():
            kind, text = key
            if kind == "rel":
                if self.related.roles.get(text) == "length_source" and idx_depths:
                    d = min(idx_depths)
                    origin = f"length({'*' * d}{self.target})"
                    rename[repr(key)] = self._extra_symbol(origin, "length_of", depth=d)
                else:
                    rename[repr(key)] = self._related_symbol(text)
            elif kind == "opaque":
                rename[repr(key)] = self._extra_symbol(f"<{text}>", "opaque", shape=self._shape(node))
            elif kind == "free":
                rename[repr(key)] = self._extra_symbol(text, "scalar")
            else:
                rename[repr(key)] = self._extra_symbol(f"<{text}>", "opaque", shape=self._shape(node))
        sym_op = {"==": "="}.get(op, op)
        return AtomicCondition(lt.rename(rename), sym_op, rt.rename(rename))


def extract_constraints(fragment: SliceFragment, related: PointerRelatedVars, cap: int = PATH_CAP) -> ConstraintSet:
    """Per-path conjunctions of guard atoms that mention a symbolic variable."""
    if related.pointer.name != fragment.pointer.name:
        raise ValueError("related variables belong to a different pointer")
    ex = _Extractor(fragment, related)
    conj_paths: list[list[AtomicCondition]] = []
    any_guard = False
    for blocks in enumerate_paths(fragment, cap):
        alts: list[list[Literal]] = [[]]
        for b in blocks:
            alts = _product(alts, _block_dnf(b, cap), cap)
        for lits in alts:
            atoms = [a for a in (ex.atom(l) for l in lits) if a is not None]
            any_guard = any_guard or bool(atoms)
            conj_paths.append(atoms)
        if len(conj_paths) > cap:
            raise PathExplosion(f"more than {cap} paths")
    if not any_guard:
        return ConstraintSet((), fragment.fragment_id, ex.symbols)
    raw = ConstraintSet(tuple(PathCondition(tuple(a), i) for i, a in enumerate(conj_paths)),
                        fragment.fragment_id, ex.symbols)
    return canonicalize_atoms(raw)
