"""Recursive-descent parser for a C subset.

Covers function definitions, scalar/array/pointer/struct declarations,
``for``/``while``/``if``/``switch``, expression statements, calls, jumps other
than ``goto``, and the usual expression operators. Typedef names are tracked
from ``typedef`` declarations; unknown identifiers in type position are
recognised heuristically (``IDENT IDENT`` or ``IDENT * IDENT`` at statement
start, common ``*_t``/``intNN`` spellings inside casts).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .ast import (
    AstNode,
    FunctionDef,
    GlobalDecl,
    NodeKind,
    ParamInfo,
    SourceLocation,
    StructMember,
    TranslationUnit,
    number_tree,
)
from .errors import ParseError, UnsupportedConstruct
from .lexer import Token, tokenize

BUILTIN_TYPES = frozenset(
    "void char short int long float double signed unsigned _Bool".split()
)
QUALIFIERS = frozenset("const volatile restrict static extern register auto inline".split())
TYPENAME_RE = re.compile(
    r"^(u?int\d+(_t)?|u?char\d*|u?long|u?short|uint|size_t|ssize_t|FILE|bool|BOOL|"
    r"float\d+(_t)?|[A-Za-z_]\w*_t)$"
)
ASSIGN_OPS = frozenset("= += -= *= /= %= &= |= ^= <<= >>=".split())
BINARY_PREC = {
    "||": 1, "&&": 2, "|": 3, "^": 4, "&": 5,
    "==": 6, "!=": 6, "<": 7, ">": 7, "<=": 7, ">=": 7,
    "<<": 8, ">>": 8, "+": 9, "-": 9, "*": 10, "/": 10, "%": 10,
}


@dataclass
class _Declarator:
    name: Optional[str]
    stars: int
    dims: list[Optional[AstNode]]
    params: Optional[list[ParamInfo]]
    name_tok: Optional[Token]
    param_nodes: list[AstNode] = field(default_factory=list)

    def type_text(self, base: str) -> str:
        text = base + (" " + "*" * self.stars if self.stars else "")
        return text + "[]" * len(self.dims)

    @property
    def is_pointer(self) -> bool:
        return self.stars > 0 or bool(self.dims)


def _node(kind, children, loc, token=None, label=None, ctype=None) -> AstNode:
    return AstNode(kind, tuple(children), loc, token=token, label=label, ctype=ctype)


def _relabel(node: AstNode, label: str) -> AstNode:
    node.label = label
    return node


def clone_tree(node: AstNode) -> AstNode:
    return AstNode(
        node.kind,
        tuple(clone_tree(c) for c in node.children),
        node.loc,
        token=node.token,
        label=node.label,
        ctype=node.ctype,
    )


class Parser:
    def __init__(self, text: str, filename: str = "<input>", typedefs: Optional[set[str]] = None):
        self.filename = filename
        self.toks = tokenize(text, filename)
        self.i = 0
        self.typedefs: set[str] = set(typedefs or ())
        self.unit = TranslationUnit(filename, typedefs=self.typedefs)
        self.unit.line_count = text.count("\n") + (0 if text.endswith("\n") else 1)

    # token helpers ---------------------------------------------------------

    def peek(self, k: int = 0) -> Token:
        j = min(self.i + k, len(self.toks) - 1)
        return self.toks[j]

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t.text == text and t.kind in ("punct", "keyword")

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    @property
    def last(self) -> Token:
        return self.toks[max(self.i - 1, 0)]

    def accept(self, text: str) -> Optional[Token]:
        if self.at(text):
            return self.advance()
        return None

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise ParseError(self.peek().loc(self.filename), repr(text))
        return self.advance()

    def expect_ident(self) -> Token:
        t = self.peek()
        if t.kind != "ident":
            raise ParseError(t.loc(self.filename), "identifier")
        return self.advance()

    def span(self, start: Token) -> SourceLocation:
        end = self.last
        if (end.line, end.col) < (start.line, start.col):
            end = start
        return SourceLocation(self.filename, start.line, end.end_line, start.col, end.end_col)

    # type recognition ------------------------------------------------------

    def is_typename(self, t: Token) -> bool:
        if t.kind == "keyword":
            return t.text in BUILTIN_TYPES or t.text in QUALIFIERS or t.text in (
                "struct", "union", "enum")
        return t.kind == "ident" and (t.text in self.typedefs or bool(TYPENAME_RE.match(t.text)))

    def looks_like_decl(self) -> bool:
        t = self.peek()
        if t.kind == "keyword":
            return t.text in BUILTIN_TYPES or t.text in QUALIFIERS or t.text in (
                "struct", "union", "enum", "typedef")
        if t.kind != "ident":
            return False
        if t.text in self.typedefs:
            return not self.at("(", 1) and self.peek(1).text not in ASSIGN_OPS
        nxt = self.peek(1)
        if nxt.kind == "ident":
            return True
        if self.at("*", 1):
            k = 1
            while self.at("*", k):
                k += 1
            if self.peek(k).kind == "ident" and self.peek(k + 1).text in (";", "=", ",", "[", ")"):
                return True
        return False

    def is_cast_ahead(self) -> bool:
        """At '(' : does a type name follow?"""
        t = self.peek(1)
        if t.kind == "keyword":
            return t.text in BUILTIN_TYPES or t.text in QUALIFIERS or t.text in (
                "struct", "union", "enum")
        if t.kind != "ident":
            return False
        if t.text in self.typedefs or TYPENAME_RE.match(t.text):
            return self.at(")", 2) or self.at("*", 2)
        return self.at("*", 2) and (self.at(")", 3) or self.at("*", 3))

    # declarations ----------------------------------------------------------

    def parse_specifiers(self) -> str:
        parts: list[str] = []
        saw_base = False
        start = self.peek()
        while True:
            t = self.peek()
            if t.kind == "keyword" and t.text in QUALIFIERS:
                if t.text not in ("static", "extern", "register", "auto", "inline"):
                    parts.append(t.text)
                self.advance()
            elif t.kind == "keyword" and t.text in BUILTIN_TYPES:
                parts.append(self.advance().text)
                saw_base = True
            elif t.kind == "keyword" and t.text in ("struct", "union", "enum"):
                parts.append(self.parse_tagged_type())
                saw_base = True
            elif t.kind == "ident" and not saw_base:
                parts.append(self.advance().text)
                saw_base = True
            else:
                break
        if not parts:
            raise ParseError(start.loc(self.filename), "type specifier")
        return " ".join(parts)

    def parse_tagged_type(self) -> str:
        kw = self.advance()
        tag = None
        if self.peek().kind == "ident":
            tag = self.advance().text
        if self.at("{"):
            if kw.text == "enum":
                self.skip_balanced("{", "}")
            else:
                self.parse_struct_body(tag or "<anon>")
        return f"{kw.text} {tag}" if tag else f"{kw.text} <anon>"

    def parse_struct_body(self, tag: str):
        self.expect("{")
        while not self.accept("}"):
            if self.peek().kind == "eof":
                raise ParseError(self.peek().loc(self.filename), "'}'")
            base = self.parse_specifiers()
            while True:
                if self.at(":"):
                    self.advance()
                    self.parse_ternary()
                else:
                    d = self.parse_declarator()
                    if self.accept(":"):
                        self.parse_ternary()
                    if d.name:
                        self.unit.members.append(
                            StructMember(tag, d.name, d.type_text(base), d.is_pointer,
                                         d.name_tok.loc(self.filename)))
                if not self.accept(","):
                    break
            self.expect(";")

    def skip_balanced(self, open_: str, close: str):
        self.expect(open_)
        depth = 1
        while depth:
            t = self.advance()
            if t.kind == "eof":
                raise ParseError(t.loc(self.filename), repr(close))
            if t.text == open_:
                depth += 1
            elif t.text == close:
                depth -= 1

    def parse_declarator(self, abstract: bool = False) -> _Declarator:
        stars = 0
        while True:
            if self.accept("*"):
                stars += 1
            elif self.peek().kind == "keyword" and self.peek().text in ("const", "volatile", "restrict"):
                self.advance()
            else:
                break
        if self.at("(") and self.at("*", 1):
            raise UnsupportedConstruct(self.peek().loc(self.filename), "function pointer declarator")
        name_tok = None
        if self.peek().kind == "ident":
            name_tok = self.advance()
        elif not abstract:
            raise ParseError(self.peek().loc(self.filename), "declarator name")
        d = _Declarator(name_tok.text if name_tok else None, stars, [], None, name_tok)
        while True:
            if self.at("["):
                self.advance()
                dim = None if self.at("]") else self.parse_ternary()
                self.expect("]")
                d.dims.append(dim)
            elif self.at("(") and d.params is None and not d.dims:
                d.params, d.param_nodes = self.parse_params()
            else:
                break
        return d

    def parse_params(self) -> tuple[list[ParamInfo], list[AstNode]]:
        self.expect("(")
        params: list[ParamInfo] = []
        nodes: list[AstNode] = []
        if self.accept(")"):
            return params, nodes
        if self.at("void") and self.at(")", 1):
            self.advance()
            self.advance()
            return params, nodes
        while True:
            if self.accept("..."):
                pass
            else:
                start = self.peek()
                base = self.parse_specifiers()
                d = self.parse_declarator(abstract=True)
                ctype = d.type_text(base)
                loc = self.span(start)
                params.append(ParamInfo(d.name, ctype, d.is_pointer, loc))
                nodes.append(_node(NodeKind.Param, [], loc, token=d.name or "", ctype=ctype))
            if not self.accept(","):
                break
        self.expect(")")
        return params, nodes

    def parse_initializer(self) -> AstNode:
        if self.at("{"):
            raise UnsupportedConstruct(self.peek().loc(self.filename), "initializer list")
        return self.parse_assign()

    def parse_local_decl(self) -> list[AstNode]:
        start = self.peek()
        if self.at("typedef"):
            self.parse_typedef()
            return []
        base = self.parse_specifiers()
        decls: list[AstNode] = []
        if self.accept(";"):
            return decls
        while True:
            d = self.parse_declarator()
            if d.params is not None:
                raise UnsupportedConstruct(d.name_tok.loc(self.filename), "local function declaration")
            children = [_relabel(x, "dim") for x in d.dims if x is not None]
            if self.accept("="):
                children.append(_relabel(self.parse_initializer(), "init"))
            ctype = base + (" " + "*" * d.stars if d.stars else "")
            decls.append(_node(NodeKind.Decl, children, self.span(d.name_tok), token=d.name, ctype=ctype))
            if not self.accept(","):
                break
        self.expect(";")
        del start
        return decls

    def parse_typedef(self):
        self.expect("typedef")
        base = self.parse_specifiers()
        while True:
            d = self.parse_declarator()
            self.typedefs.add(d.name)
            if not self.accept(","):
                break
        self.expect(";")
        del base

    # translation unit ------------------------------------------------------

    def parse_unit(self, on_unsupported: str = "raise") -> TranslationUnit:
        while self.peek().kind != "eof":
            if self.accept(";"):
                continue
            if self.at("typedef"):
                self.parse_typedef()
                continue
            start = self.peek()
            base = self.parse_specifiers()
            if self.accept(";"):
                continue
            while True:
                d = self.parse_declarator()
                if d.params is not None and self.at("{"):
                    self.parse_function(start, base, d, on_unsupported)
                    break
                if self.accept("="):
                    self.skip_initializer()
                if d.params is None:
                    self.unit.globals.append(
                        GlobalDecl(d.name, d.type_text(base), d.is_pointer, d.name_tok.loc(self.filename)))
                if not self.accept(","):
                    self.expect(";")
                    break
        return self.unit

    def skip_initializer(self):
        depth = 0
        while True:
            t = self.peek()
            if t.kind == "eof":
                raise ParseError(t.loc(self.filename), "';'")
            if depth == 0 and t.text in (",", ";"):
                return
            if t.text in ("{", "(", "["):
                depth += 1
            elif t.text in ("}", ")", "]"):
                depth -= 1
            self.advance()

    def _matching_brace(self, open_index: int) -> int:
        depth = 0
        for j in range(open_index, len(self.toks)):
            t = self.toks[j]
            if t.kind == "punct" and t.text == "{":
                depth += 1
            elif t.kind == "punct" and t.text == "}":
                depth -= 1
                if depth == 0:
                    return j
        raise ParseError(self.toks[open_index].loc(self.filename), "'}'")

    def parse_function(self, start: Token, base: str, d: _Declarator, on_unsupported: str):
        open_index = self.i
        try:
            body = self.parse_compound()
        except UnsupportedConstruct as exc:
            if on_unsupported != "skip":
                raise
            self.unit.skipped.append(exc)
            self.i = self._matching_brace(open_index) + 1
            return
        loc = self.span(start)
        ret_type = base + (" " + "*" * d.stars if d.stars else "")
        fnode = _node(NodeKind.FuncDef, [*d.param_nodes, _relabel(body, "body")], loc,
                      token=d.name, ctype=ret_type)
        for p in d.param_nodes:
            p.label = "param"
        number_tree(fnode)
        self.unit.functions.append(FunctionDef(d.name, d.params, body, loc, ret_type, fnode))

    # statements ------------------------------------------------------------

    def parse_compound(self) -> AstNode:
        start = self.expect("{")
        stmts: list[AstNode] = []
        while not self.at("}"):
            if self.peek().kind == "eof":
                raise ParseError(self.peek().loc(self.filename), "'}'")
            stmts.extend(self.parse_statement())
        self.expect("}")
        return _node(NodeKind.Compound, stmts, self.span(start))

    def parse_sub_statement(self, label: str) -> Optional[AstNode]:
        """A single statement in control position; declarations/empties collapse."""
        stmts = self.parse_statement()
        if not stmts:
            return None
        if len(stmts) == 1:
            return _relabel(stmts[0], label)
        loc = SourceLocation.span(stmts[0].loc, stmts[-1].loc)
        return _node(NodeKind.Compound, stmts, loc, label=label)

    def parse_statement(self) -> list[AstNode]:
        t = self.peek()
        floc = t.loc(self.filename)
        if t.kind == "punct" and t.text == "{":
            return [self.parse_compound()]
        if t.kind == "punct" and t.text == ";":
            self.advance()
            return []
        if t.kind == "keyword":
            kw = t.text
            if kw in ("goto", "do"):
                raise UnsupportedConstruct(floc, kw)
            if kw == "if":
                return [self.parse_if()]
            if kw == "for":
                return [self.parse_for()]
            if kw == "while":
                return [self.parse_while()]
            if kw == "switch":
                return [self.parse_switch()]
            if kw in ("case", "default"):
                return [self.parse_case()]
            if kw == "return":
                self.advance()
                children = [] if self.at(";") else [_relabel(self.parse_expr(), "value")]
                self.expect(";")
                return [_node(NodeKind.Return, children, self.span(t))]
            if kw in ("break", "continue"):
                self.advance()
                self.expect(";")
                kind = NodeKind.Break if kw == "break" else NodeKind.Continue
                return [_node(kind, [], self.span(t))]
        if t.kind == "ident" and self.at(":", 1):
            raise UnsupportedConstruct(floc, "label")
        if self.looks_like_decl():
            return self.parse_local_decl()
        e = self.parse_expr()
        self.expect(";")
        return [e]

    def parse_if(self) -> AstNode:
        start = self.expect("if")
        self.expect("(")
        cond = _relabel(self.parse_expr(), "cond")
        self.expect(")")
        children = [cond]
        then = self.parse_sub_statement("then")
        if then is None:
            then = _node(NodeKind.Compound, [], self.span(self.last), label="then")
        children.append(then)
        if self.accept("else"):
            other = self.parse_sub_statement("else")
            if other is not None:
                children.append(other)
        return _node(NodeKind.If, children, self.span(start))

    def parse_for(self) -> AstNode:
        start = self.expect("for")
        self.expect("(")
        children = []
        if not self.at(";"):
            if self.looks_like_decl():
                decls = self.parse_local_decl()
                if len(decls) != 1:
                    raise UnsupportedConstruct(start.loc(self.filename), "multi-declarator for-init")
                children.append(_relabel(decls[0], "init"))
            else:
                children.append(_relabel(self.parse_expr(), "init"))
                self.expect(";")
        else:
            self.expect(";")
        if not self.at(";"):
            children.append(_relabel(self.parse_expr(), "cond"))
        self.expect(";")
        if not self.at(")"):
            children.append(_relabel(self.parse_expr(), "next"))
        self.expect(")")
        body = self.parse_sub_statement("body")
        if body is not None:
            children.append(body)
        return _node(NodeKind.For, children, self.span(start))

    def parse_while(self) -> AstNode:
        start = self.expect("while")
        self.expect("(")
        children = [_relabel(self.parse_expr(), "cond")]
        self.expect(")")
        body = self.parse_sub_statement("body")
        if body is not None:
            children.append(body)
        return _node(NodeKind.While, children, self.span(start))

    def parse_switch(self) -> AstNode:
        start = self.expect("switch")
        self.expect("(")
        children = [_relabel(self.parse_expr(), "cond")]
        self.expect(")")
        body = self.parse_sub_statement("body")
        if body is not None:
            children.append(body)
        return _node(NodeKind.Switch, children, self.span(start))

    def parse_case(self) -> AstNode:
        start = self.advance()
        children = []
        token = None
        if start.text == "case":
            children.append(_relabel(self.parse_ternary(), "expr"))
        else:
            token = "default"
        self.expect(":")
        while not (self.at("case") or self.at("default") or self.at("}")):
            if self.peek().kind == "eof":
                raise ParseError(self.peek().loc(self.filename), "'}'")
            children.extend(_relabel(s, "stmt") for s in self.parse_statement())
        return _node(NodeKind.Case, children, self.span(start), token=token)

    # expressions -----------------------------------------------------------

    def parse_expr(self) -> AstNode:
        start = self.peek()
        e = self.parse_assign()
        while self.at(","):
            self.advance()
            rhs = self.parse_assign()
            e = _node(NodeKind.BinaryOp, [_relabel(e, "left"), _relabel(rhs, "right")],
                      self.span(start), token=",")
        return e

    def parse_assign(self) -> AstNode:
        start = self.peek()
        lhs = self.parse_ternary()
        op = self.peek()
        if op.kind == "punct" and op.text in ASSIGN_OPS:
            self.advance()
            rhs = self.parse_assign()
            if op.text != "=":
                rhs = _node(NodeKind.BinaryOp, [_relabel(clone_tree(lhs), "left"), _relabel(rhs, "right")],
                            self.span(start), token=op.text[:-1])
            return _node(NodeKind.Assignment, [_relabel(lhs, "lhs"), _relabel(rhs, "rhs")],
                         self.span(start), token="=")
        return lhs

    def parse_ternary(self) -> AstNode:
        start = self.peek()
        cond = self.parse_binary(1)
        if self.accept("?"):
            a = self.parse_expr()
            self.expect(":")
            b = self.parse_ternary()
            return _node(NodeKind.TernaryOp,
                         [_relabel(cond, "cond"), _relabel(a, "then"), _relabel(b, "else")],
                         self.span(start))
        return cond

    def parse_binary(self, min_prec: int) -> AstNode:
        start = self.peek()
        lhs = self.parse_unary()
        while True:
            op = self.peek()
            prec = BINARY_PREC.get(op.text) if op.kind == "punct" else None
            if prec is None or prec < min_prec:
                return lhs
            self.advance()
            rhs = self.parse_binary(prec + 1)
            lhs = _node(NodeKind.BinaryOp, [_relabel(lhs, "left"), _relabel(rhs, "right")],
                        self.span(start), token=op.text)

    def parse_type_name(self) -> str:
        base = self.parse_specifiers()
        d = self.parse_declarator(abstract=True)
        return d.type_text(base)

    def parse_unary(self) -> AstNode:
        t = self.peek()
        if t.kind == "punct":
            if t.text in ("++", "--"):
                self.advance()
                operand = self.parse_unary()
                return _node(NodeKind.UnaryOp, [_relabel(operand, "operand")], self.span(t), token=t.text)
            if t.text in ("-", "+", "!", "~"):
                self.advance()
                operand = self.parse_unary()
                return _node(NodeKind.UnaryOp, [_relabel(operand, "operand")], self.span(t), token=t.text)
            if t.text == "*":
                self.advance()
                operand = self.parse_unary()
                return _node(NodeKind.Deref, [_relabel(operand, "operand")], self.span(t), token="*")
            if t.text == "&":
                self.advance()
                operand = self.parse_unary()
                return _node(NodeKind.AddressOf, [_relabel(operand, "operand")], self.span(t), token="&")
            if t.text == "(" and self.is_cast_ahead():
                self.advance()
                ctype = self.parse_type_name()
                self.expect(")")
                operand = self.parse_unary()
                return _node(NodeKind.Cast, [_relabel(operand, "expr")], self.span(t), ctype=ctype)
        if t.kind == "keyword" and t.text == "sizeof":
            self.advance()
            if self.at("(") and self.is_cast_ahead():
                lp = self.advance()
                ctype = self.parse_type_name()
                self.expect(")")
                operand = _node(NodeKind.Constant, [], self.span(lp), token=ctype, label="operand")
            else:
                operand = _relabel(self.parse_unary(), "operand")
            return _node(NodeKind.UnaryOp, [operand], self.span(t), token="sizeof")
        return self.parse_postfix()

    def parse_postfix(self) -> AstNode:
        start = self.peek()
        e = self.parse_primary()
        while True:
            if self.accept("["):
                idx = self.parse_expr()
                self.expect("]")
                e = _node(NodeKind.ArrayRef, [_relabel(e, "base"), _relabel(idx, "index")], self.span(start))
            elif self.at("("):
                self.advance()
                args = []
                if not self.at(")"):
                    while True:
                        args.append(_relabel(self.parse_assign(), "arg"))
                        if not self.accept(","):
                            break
                self.expect(")")
                e = _node(NodeKind.Call, [_relabel(e, "func"), *args], self.span(start))
            elif self.at(".") or self.at("->"):
                op = self.advance()
                ft = self.expect_ident()
                fld = _node(NodeKind.ID, [], ft.loc(self.filename), token=ft.text, label="field")
                e = _node(NodeKind.StructRef, [_relabel(e, "base"), fld], self.span(start), token=op.text)
            elif self.at("++") or self.at("--"):
                op = self.advance()
                e = _node(NodeKind.UnaryOp, [_relabel(e, "operand")], self.span(start), token="p" + op.text)
            else:
                return e

    def parse_primary(self) -> AstNode:
        t = self.peek()
        if t.kind == "ident":
            self.advance()
            return _node(NodeKind.ID, [], t.loc(self.filename), token=t.text)
        if t.kind in ("int", "float", "char"):
            self.advance()
            return _node(NodeKind.Constant, [], t.loc(self.filename), token=t.text)
        if t.kind == "string":
            self.advance()
            parts = [t.text]
            while self.peek().kind == "string":
                parts.append(self.advance().text)
            return _node(NodeKind.Constant, [], self.span(t), token=" ".join(parts))
        if t.kind == "punct" and t.text == "(":
            self.advance()
            e = self.parse_expr()
            self.expect(")")
            return e
        raise ParseError(t.loc(self.filename), "expression")


def parse_translation_unit(text: str, filename: str = "<input>", on_unsupported: str = "raise",
                           typedefs: Optional[set[str]] = None) -> TranslationUnit:
    """Parse a whole file. With ``on_unsupported="skip"`` functions containing
    unsupported constructs are dropped and their errors collected in
    ``unit.skipped``."""
    return Parser(text, filename, typedefs).parse_unit(on_unsupported)


def parse_source(text: str, filename: str = "<input>", on_unsupported: str = "raise") -> list[FunctionDef]:
    return parse_translation_unit(text, filename, on_unsupported).functions
