from pathlib import Path

import pytest

from ptrclones.cfront import parse_translation_unit
from ptrclones.ptranalysis import pointer_related_vars, select_pointers
from ptrclones.slicer import isolate

FIXTURES = Path(__file__).parent / "fixtures"


def load_fragment(rel_path: str, pointer: str, fragment_id: int = 0):
    path = FIXTURES / rel_path
    tu = parse_translation_unit(path.read_text(), path.name)
    fn = tu.functions[0]
    rec = next(p for p in select_pointers(tu.functions, tu.globals, tu.members) if p.name == pointer)
    related = pointer_related_vars(fn, rec)
    return isolate(fn, rec, related, fragment_id), related


@pytest.fixture
def fig1_pair():
    return (load_fragment("fig1/dict2pid.c", "mdef->sseq", 1),
            load_fragment("fig1/gc_closest.c", "gs->codeword", 2))


@pytest.fixture
def fig3_pair():
    return (load_fragment("fig3/mgau_eval.c", "active", 3),
            load_fragment("fig3/lextree_histbin.c", "list", 4))
