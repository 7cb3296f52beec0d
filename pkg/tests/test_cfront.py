import pytest

from ptrclones.cfront import (
    NodeKind,
    ParseError,
    UnsupportedConstruct,
    function_to_c,
    kind_sequence,
    parse_source,
    parse_translation_unit,
    post_order,
    post_order_nodes,
    subtree_statements,
)
from ptrclones.cfront.lexer import tokenize

from conftest import FIXTURES

K = NodeKind


def test_assignment_post_order():
    fn = parse_source("void f(int b){ int a; a = b + 1; }")[0]
    stmt = fn.body.children[1]
    assert kind_sequence(stmt) == [K.ID, K.ID, K.Constant, K.BinaryOp, K.Assignment]


def test_post_order_ids_are_increasing():
    fn = parse_source("void f(int *a, int n){ int i; for (i = 0; i < n; i++) a[i] = 0; }")[0]
    ids = [n.node_id for n in post_order_nodes(fn.body)]
    assert ids == sorted(ids)
    assert [nid for _, nid in post_order(fn.body)] == ids


def test_parse_fig1_fixture():
    tu = parse_translation_unit((FIXTURES / "fig1/dict2pid.c").read_text(), "dict2pid.c")
    assert [f.name for f in tu.functions] == ["dict2pid_dump"]
    fn = tu.functions[0]
    assert [p.name for p in fn.params] == ["fp", "mdef", "verbose"]
    fors = [n for n in fn.body.walk() if n.kind == K.For]
    assert len(fors) == 2
    assert fors[0].loc.line_begin == 12


def test_goto_is_unsupported():
    with pytest.raises(UnsupportedConstruct):
        parse_source("int f(){ goto done; }")


def test_skip_mode_keeps_other_functions():
    tu = parse_translation_unit("int f(){ goto x; }\nint g(int *p){ return p[0]; }", on_unsupported="skip")
    assert [f.name for f in tu.functions] == ["g"]
    assert len(tu.skipped) == 1


def test_preprocessor_directive_rejected():
    with pytest.raises(ParseError):
        parse_source("#include <stdio.h>\nint f(){ return 0; }")


def test_syntax_error_has_location():
    with pytest.raises(ParseError) as info:
        parse_source("int f(){ return (1; }")
    assert info.value.loc.line_begin == 1


def test_compound_assignment_desugars():
    fn = parse_source("void f(int *a){ a[0] += 2; }")[0]
    stmt = fn.body.children[0]
    assert stmt.kind == K.Assignment
    rhs = stmt.child("rhs")
    assert rhs.kind == K.BinaryOp and rhs.token == "+"
    assert rhs.children[0].kind == K.ArrayRef


def test_struct_ref_field_child():
    fn = parse_source("void f(struct s *p){ p->n = 1; }")[0]
    ref = fn.body.children[0].child("lhs")
    assert ref.kind == K.StructRef and ref.token == "->"
    assert ref.child("field").kind == K.ID and ref.child("field").token == "n"


def test_postfix_increment_token():
    fn = parse_source("void f(int i){ i++; ++i; }")[0]
    assert [s.token for s in fn.body.children] == ["p++", "++"]


def test_pretty_print_reparses_to_same_kinds():
    src = (FIXTURES / "fig1/dict2pid.c").read_text()
    fn = parse_translation_unit(src, "x.c").functions[0]
    text = "typedef struct { int n_sseq; int **sseq; } mdef_t;\n" + function_to_c(fn)
    again = parse_translation_unit(text, "y.c").functions[0]
    assert kind_sequence(again.body) == kind_sequence(fn.body)


def test_child_locations_inside_parent():
    fn = parse_translation_unit((FIXTURES / "fig3/mgau_eval.c").read_text(), "m.c").functions[0]
    for node in fn.body.walk():
        for c in node.children:
            assert node.loc.contains(c.loc)


def test_subtree_statements_flattens_blocks():
    fn = parse_source("void f(int *a){ int i; { a[0] = 1; } for (i = 0; i < 3; i++) { a[i] = i; } }")[0]
    entries = subtree_statements(fn.body)
    kinds = [e.node.kind for e in entries]
    assert K.Compound not in kinds
    inner = [e for e in entries if e.control is not None]
    assert len(inner) == 1 and inner[0].control.kind == K.For


def test_tokenizer_positions():
    toks = tokenize("a = b;\n  c++;")
    c = next(t for t in toks if t.text == "c")
    assert (c.line, c.col) == (2, 3)
