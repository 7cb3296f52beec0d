"""Render syntax trees back to C text."""

from __future__ import annotations

from .ast import AstNode, FunctionDef, NodeKind

_IND = "    "


def expr_to_c(node: AstNode) -> str:
    k = node.kind
    if k in (NodeKind.ID, NodeKind.Constant):
        return node.token
    if k == NodeKind.ArrayRef:
        return f"{_wrap(node.child('base'))}[{expr_to_c(node.child('index'))}]"
    if k == NodeKind.StructRef:
        base, fld = node.children
        return f"{_wrap(base)}{node.token}{fld.token}"
    if k == NodeKind.Call:
        func, *args = node.children
        return f"{_wrap(func)}({', '.join(expr_to_c(a) for a in args)})"
    if k == NodeKind.Assignment:
        lhs, rhs = node.children
        return f"{expr_to_c(lhs)} = {expr_to_c(rhs)}"
    if k == NodeKind.BinaryOp:
        left, right = node.children
        if node.token == ",":
            return f"{expr_to_c(left)}, {expr_to_c(right)}"
        return f"{_wrap(left)} {node.token} {_wrap(right)}"
    if k == NodeKind.UnaryOp:
        (operand,) = node.children
        if node.token == "sizeof":
            if operand.kind == NodeKind.Constant and operand.label == "operand" and not _is_literal(operand.token):
                return f"sizeof({operand.token})"
            return f"sizeof({expr_to_c(operand)})"
        if node.token.startswith("p"):
            return f"{_wrap(operand)}{node.token[1:]}"
        return f"{node.token}{_wrap(operand)}"
    if k == NodeKind.Deref:
        return f"*{_wrap(node.children[0])}"
    if k == NodeKind.AddressOf:
        return f"&{_wrap(node.children[0])}"
    if k == NodeKind.Cast:
        return f"({node.ctype}){_wrap(node.children[0])}"
    if k == NodeKind.TernaryOp:
        c, a, b = node.children
        return f"{_wrap(c)} ? {_wrap(a)} : {_wrap(b)}"
    raise ValueError(f"not an expression: {node.kind.name}")


def _is_literal(tok: str) -> bool:
    return tok[:1].isdigit() or tok[:1] in "'\"."


def _wrap(node: AstNode) -> str:
    if node.kind in (NodeKind.ID, NodeKind.Constant, NodeKind.ArrayRef, NodeKind.StructRef, NodeKind.Call):
        return expr_to_c(node)
    return f"({expr_to_c(node)})"


def _decl_to_c(node: AstNode) -> str:
    ctype = node.ctype
    dims = "".join(f"[{expr_to_c(c)}]" for c in node.children if c.label == "dim")
    init = node.child("init")
    text = f"{ctype} {node.token}{dims}"
    if init is not None:
        text += f" = {expr_to_c(init)}"
    return text


def stmt_to_c(node: AstNode, depth: int = 0) -> str:
    pad = _IND * depth
    k = node.kind
    if k == NodeKind.Compound:
        inner = "".join(stmt_to_c(c, depth + 1) for c in node.children)
        return f"{pad}{{\n{inner}{pad}}}\n"
    if k == NodeKind.Decl:
        return f"{pad}{_decl_to_c(node)};\n"
    if k == NodeKind.For:
        init = node.child("init")
        if init is None:
            init_s = ""
        elif init.kind == NodeKind.Decl:
            init_s = _decl_to_c(init)
        else:
            init_s = expr_to_c(init)
        cond = node.child("cond")
        nxt = node.child("next")
        head = f"for ({init_s}; {expr_to_c(cond) if cond else ''}; {expr_to_c(nxt) if nxt else ''})"
        return pad + head + _body(node.child("body"), depth)
    if k == NodeKind.While:
        return f"{pad}while ({expr_to_c(node.child('cond'))})" + _body(node.child("body"), depth)
    if k == NodeKind.If:
        text = f"{pad}if ({expr_to_c(node.child('cond'))})" + _body(node.child("then"), depth)
        other = node.child("else")
        if other is not None:
            text += f"{pad}else" + _body(other, depth)
        return text
    if k == NodeKind.Switch:
        return f"{pad}switch ({expr_to_c(node.child('cond'))})" + _body(node.child("body"), depth)
    if k == NodeKind.Case:
        expr = node.child("expr")
        head = f"{pad}case {expr_to_c(expr)}:\n" if expr is not None else f"{pad}default:\n"
        return head + "".join(stmt_to_c(c, depth + 1) for c in node.children if c.label == "stmt")
    if k == NodeKind.Return:
        value = node.child("value")
        return f"{pad}return{' ' + expr_to_c(value) if value else ''};\n"
    if k == NodeKind.Break:
        return f"{pad}break;\n"
    if k == NodeKind.Continue:
        return f"{pad}continue;\n"
    return f"{pad}{expr_to_c(node)};\n"


def _body(node, depth: int) -> str:
    if node is None:
        return ";\n"
    if node.kind == NodeKind.Compound:
        return " " + stmt_to_c(node, depth).lstrip()
    return "\n" + stmt_to_c(node, depth + 1)


def function_to_c(fn: FunctionDef) -> str:
    params = ", ".join(_param_to_c(p) for p in fn.params) or "void"
    return f"{fn.return_type} {fn.name}({params})\n" + stmt_to_c(fn.body, 0)


def _param_to_c(p) -> str:
    ctype = p.ctype
    if ctype.endswith("[]"):
        base = ctype
        dims = ""
        while base.endswith("[]"):
            base = base[:-2]
            dims += "[]"
        return f"{base} {p.name or ''}{dims}"
    return f"{ctype} {p.name or ''}".rstrip()
