"""C-subset front end: tokenizer, parser, tree types and printers."""

from .ast import (
    CONTROL_KINDS,
    AstNode,
    FunctionDef,
    GlobalDecl,
    NodeKind,
    ParamInfo,
    SourceLocation,
    StatementEntry,
    StructMember,
    TranslationUnit,
    control_bodies,
    header_children,
    kind_sequence,
    number_tree,
    post_order,
    post_order_nodes,
    subtree_statements,
)
from .errors import ParseError, UnsupportedConstruct
from .parser import clone_tree, parse_source, parse_translation_unit
from .pretty import expr_to_c, function_to_c, stmt_to_c

__all__ = [
    "CONTROL_KINDS", "AstNode", "FunctionDef", "GlobalDecl", "NodeKind", "ParamInfo",
    "SourceLocation", "StatementEntry", "StructMember", "TranslationUnit", "control_bodies",
    "header_children", "kind_sequence", "number_tree", "post_order", "post_order_nodes",
    "subtree_statements", "ParseError", "UnsupportedConstruct", "clone_tree", "parse_source",
    "parse_translation_unit", "expr_to_c", "function_to_c", "stmt_to_c",
]
