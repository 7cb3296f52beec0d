"""Compare the path constraints two slices place on their pointer accesses."""

from _common import slice_of
from ptrclones.verifier import verify_fragments

for name, a, b in [
    ("fig1", ("fig1/dict2pid.c", "mdef->sseq"), ("fig1/gc_closest.c", "gs->codeword")),
    ("fig3", ("fig3/mgau_eval.c", "active"), ("fig3/lextree_histbin.c", "list")),
]:
    fa, ra = slice_of(*a, 0)
    fb, rb = slice_of(*b, 1)
    rec = verify_fragments(fa, ra, fb, rb)
    print(f"{name}: {rec.verdict} ({rec.reason})")
    for c in rec.constraints:
        print("   ", c)
