import pytest

from ptrclones.cfront import SourceLocation, parse_translation_unit
from ptrclones.ptranalysis import (
    PointerRecord,
    TargetNotUsed,
    build_dependency_graph,
    pointer_related_vars,
    select_pointers,
)

from conftest import load_fragment

LOC = SourceLocation("x.c", 1, 1, 1, 1)


def _unit(src):
    return parse_translation_unit(src, "t.c")


def _record(tu, name, fn=None):
    return next(p for p in select_pointers(tu.functions, tu.globals, tu.members)
                if p.name == name and (fn is None or p.owning_function in (None, fn)))


def test_fig1_related_variables():
    _, rel = load_fragment("fig1/dict2pid.c", "mdef->sseq")
    assert rel.vars == ["i", "j", "mdef", "mdef->n_sseq", "mdef_n_emit_state(mdef)", "mdef->sseq"]
    assert rel.roles["i"] == rel.roles["j"] == "index"
    assert rel.roles["mdef->n_sseq"] == "length_source"
    assert rel.roles["mdef_n_emit_state(mdef)"] == "length_source"
    assert rel.roles["mdef->sseq"] == "other"


def test_fig3_related_variables():
    _, active = load_fragment("fig3/mgau_eval.c", "active")
    assert active.vars == ["j", "c", "active"]
    _, lst = load_fragment("fig3/lextree_histbin.c", "list")
    assert {"i", "lextree->n_active"} <= set(lst.vars)
    assert lst.roles["lextree->n_active"] == "bound"


def test_dependency_graph_edge_kinds():
    tu = _unit("void f(int *a, int n){ int i, k; k = n; for (i = 0; i < k; i++) a[i] = 0; }")
    g = build_dependency_graph(tu.functions[0], _record(tu, "a"))
    assert ("n", "k", "assignment") in g.edges
    assert ("k", "i", "loop_bound") in g.edges
    assert ("i", "a", "array_index") in g.edges
    assert "n -> k [assignment]" in g.dump()


def test_call_param_edge():
    tu = _unit("void f(int *a, char *s){ int n, i; n = strlen(s); for (i = 0; i < n; i++) a[i] = 0; }")
    g = build_dependency_graph(tu.functions[0], _record(tu, "a"))
    assert ("s", "strlen(s)", "call_param") in g.edges
    assert ("strlen(s)", "n", "assignment") in g.edges


def test_unrelated_variable_not_tainted():
    tu = _unit("void f(int *a, int n){ int i, z; z = 5; for (i = 0; i < n; i++) a[i] = 0; }")
    rel = pointer_related_vars(tu.functions[0], _record(tu, "a"))
    assert "z" not in rel.vars
    assert {"i", "n", "a"} <= set(rel.vars)


def test_taint_stays_inside_function():
    src = ("void f(int *a, int n){ int i; for (i = 0; i < n; i++) a[i] = 0; }\n"
           "void g(int *a, int m){ int q; q = m; a[q] = 1; }")
    tu = _unit(src)
    rel = pointer_related_vars(tu.functions[0], _record(tu, "a", "f"))
    assert "q" not in rel.vars and "m" not in rel.vars
    g = build_dependency_graph(tu.functions[0], _record(tu, "a", "f"))
    assert not {"q", "m"} & g.nodes


def test_target_not_used():
    tu = _unit("void f(int *a){ a[0] = 1; }\nvoid g(int x){ x = 2; }")
    with pytest.raises(TargetNotUsed):
        build_dependency_graph(tu.functions[1], _record(tu, "a"))


def test_select_pointers_kinds():
    src = ("int *buf;\n"
           "typedef struct { int n; int *data; } vec_t;\n"
           "void f(vec_t *v, int k){ int local[4]; int *q; local[0] = buf[0]; q = v->data; v->data[k] = 0; }")
    tu = _unit(src)
    recs = {(r.name, r.decl_kind) for r in select_pointers(tu.functions, tu.globals, tu.members)}
    assert {("buf", "global"), ("v", "param"), ("local", "local"), ("q", "local"),
            ("v->data", "struct_member")} <= recs
    assert ("k", "param") not in recs


def test_pointer_record_validation():
    with pytest.raises(ValueError):
        PointerRecord("", "local", "f", LOC)
    with pytest.raises(ValueError):
        PointerRecord("p", "param", None, LOC)
