"""Turn slices into node-kind count vectors and group them."""

from _common import slice_of
from ptrclones.clonedet import CloneConfig, cluster, distance_threshold, euclidean, vectorize_fragment

pairs = [("fig1/dict2pid.c", "mdef->sseq"), ("fig1/gc_closest.c", "gs->codeword"),
         ("fig3/mgau_eval.c", "active"), ("fig3/lextree_histbin.c", "list")]
vectors = []
for i, (path, ptr) in enumerate(pairs):
    frag, _ = slice_of(path, ptr, i)
    vectors.append(vectorize_fragment(frag))
    print(f"{path:28s} {ptr:14s} size={vectors[-1].size}")

for s in (1.0, 0.9, 0.8):
    a, b = vectors[0], vectors[1]
    print(f"S={s}: fig1 distance {euclidean(a, b):.3f} vs threshold {distance_threshold(s, a, b):.3f}")
    cfg = CloneConfig(similarity=s, min_size=5)
    print("   clusters:", [c.members for c in cluster(vectors, cfg)])
