from pathlib import Path

from ptrclones.cfront import parse_translation_unit
from ptrclones.ptranalysis import pointer_related_vars, select_pointers
from ptrclones.slicer import isolate

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def slice_of(rel_path: str, pointer: str, fragment_id: int):
    path = FIXTURES / rel_path
    tu = parse_translation_unit(path.read_text(), path.name)
    fn = tu.functions[0]
    rec = next(p for p in select_pointers(tu.functions, tu.globals, tu.members) if p.name == pointer)
    related = pointer_related_vars(fn, rec)
    return isolate(fn, rec, related, fragment_id), related
