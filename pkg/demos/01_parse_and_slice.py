"""Parse a C function, find its pointer targets and isolate one slice."""

from _common import FIXTURES, slice_of
from ptrclones.cfront import parse_translation_unit
from ptrclones.ptranalysis import select_pointers

src = (FIXTURES / "fig1" / "dict2pid.c").read_text()
print(src)
tu = parse_translation_unit(src, "dict2pid.c")
print("pointer targets:", [p.name for p in select_pointers(tu.functions, tu.globals, tu.members)])

frag, related = slice_of("fig1/dict2pid.c", "mdef->sseq", 1)
print("related variables:", sorted(related.vars))
print("kept lines:", [o.line_begin for o in frag.origin])
print("--- slice ---")
print(frag.to_c())
