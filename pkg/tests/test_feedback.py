from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptrclones.cfront import NodeKind
from ptrclones.clonedet import (
    CloneConfig,
    FeatureVector,
    distance_threshold,
    euclidean,
    vectorize_fragment,
    vectorize_kinds,
)
from ptrclones.feedback import (
    DeltaInvalid,
    apply_false_positive,
    apply_true_positive,
    run_loop,
    weigh_false_positive,
)
from ptrclones.lcs import LcsDiff, lcs_diff

K = NodeKind


def fv(counts, fid=0):
    return FeatureVector(np.array(counts), fid, "paper9")


def test_worked_example_with_stated_uncommon_nodes():
    a, b = fv([7, 2, 2, 2, 0, 1, 1, 1, 1], 0), fv([8, 1, 1, 2, 1, 1, 1, 1, 1], 1)
    diff = LcsDiff((), Counter([K.Constant, K.ArrayRef, K.Assignment]), Counter([K.ID, K.StructRef]), (), ())
    oa, ob = apply_false_positive(a, b, diff, 0.75, 2.0)
    assert oa.counts.tolist() == [7, 3, 3, 3, 0, 1, 1, 1, 1]
    assert ob.counts.tolist() == [9, 1, 1, 2, 2, 1, 1, 1, 1]
    assert euclidean(oa, ob) == pytest.approx(17 ** 0.5)
    assert distance_threshold(0.75, oa, ob) == pytest.approx(9.5 ** 0.5)


def test_fig3_diff_has_two_uncommon_nodes_per_tree(fig3_pair):
    (fa, _), (fb, _) = fig3_pair
    d = lcs_diff(fa.kind_sequence(), fb.kind_sequence())
    assert d.uncommon_a == Counter([K.ArrayRef, K.Constant])
    assert d.uncommon_b == Counter([K.ID, K.StructRef])


def test_true_positive_removes_uncommon_counts():
    seq_a = [K.ID, K.Call, K.ID, K.Call, K.Return]
    seq_b = [K.ID, K.ID, K.Call, K.Return]
    d = lcs_diff(seq_a, seq_b)
    assert d.uncommon_a == Counter([K.Call])
    va, vb = vectorize_kinds(seq_a, fragment_id=0), vectorize_kinds(seq_b, fragment_id=1)
    oa, ob = apply_true_positive(va, vb, d)
    call = list(K).index(K.Call)
    assert va.counts[call] == 2 and oa.counts[call] == 1
    assert euclidean(oa, ob) == 0.0


def test_true_positive_identical_and_idempotent():
    seq = [K.ID, K.Constant, K.Assignment]
    v = vectorize_kinds(seq)
    d = lcs_diff(seq, seq)
    o1, _ = apply_true_positive(v, v, d)
    assert o1.counts.tolist() == v.counts.tolist()
    seq_b = seq + [K.Return]
    d2 = lcs_diff(seq, seq_b)
    once = apply_true_positive(v, vectorize_kinds(seq_b), d2)
    twice = apply_true_positive(*once, d2)
    assert [x.counts.tolist() for x in once] == [x.counts.tolist() for x in twice]


def test_delta_must_exceed_one():
    a = fv([7, 2, 2, 2, 0, 1, 1, 1, 1])
    d = LcsDiff((), Counter([K.ID]), Counter(), (), ())
    with pytest.raises(DeltaInvalid):
        apply_false_positive(a, a, d, 0.8, 1.0)


def test_no_uncommon_kinds_is_irreducible():
    a = fv([7, 2, 2, 2, 0, 1, 1, 1, 1])
    d = LcsDiff((), Counter(), Counter(), (), ())
    out = weigh_false_positive(a, a, d, 0.8, 2.0)
    assert out.irreducible and not out.separated
    assert out.o_i.counts.tolist() == a.counts.tolist()


small_seqs = st.lists(st.sampled_from([K.ID, K.Constant, K.ArrayRef, K.Assignment, K.BinaryOp]), min_size=1, max_size=15)


@settings(max_examples=100, deadline=None)
@given(small_seqs, small_seqs, st.floats(1.1, 3.0))
def test_weighting_increases_distance(a, b, delta):
    d = lcs_diff(a, b)
    va, vb = vectorize_kinds(a, "full"), vectorize_kinds(b, "full")
    out = weigh_false_positive(va, vb, d, 0.5, delta)
    if out.irreducible:
        return
    assert euclidean(out.o_i, out.o_j) > euclidean(va, vb)
    assert out.separated


# loop -----------------------------------------------------------------------

def _seq(n_ids, extra=()):
    return [K.ID] * n_ids + [K.Constant, K.Assignment, K.For, K.Compound, *extra]


def test_loop_without_false_positives_converges_immediately():
    seqs = {0: _seq(10), 1: _seq(10), 2: _seq(30, [K.Call] * 5)}
    res = run_loop(seqs, lambda a, b: "equivalent", CloneConfig(similarity=0.8, min_size=5))
    assert res.state.converged and res.state.convergence_iteration == 1
    assert res.state.overrides == {} and res.state.fp_seen == 0


def test_loop_eliminates_fig3_pair(fig3_pair):
    (fa, _), (fb, _) = fig3_pair
    seqs = {3: fa.kind_sequence(), 4: fb.kind_sequence()}
    cfg = CloneConfig(similarity=0.75, min_size=10, preset="paper9")
    res = run_loop(seqs, lambda a, b: "different", cfg, delta=2.0)
    st_ = res.state
    assert [row["fp_eliminated"] for row in st_.log] == [1, 0]
    assert st_.convergence_iteration == 2
    assert st_.fp_seen == st_.fp_eliminated == 1
    assert res.clusters == []
    assert all(o.provenance for o in st_.overrides.values())


def test_loop_random_delta_range():
    seqs = {0: _seq(12, [K.Call]), 1: _seq(12, [K.Return])}
    res = run_loop(seqs, lambda a, b: "different", CloneConfig(similarity=0.8, min_size=5), delta="random", seed=3)
    assert all(1.0 < row["delta"] <= 3.0 for row in res.state.log)
    again = run_loop(seqs, lambda a, b: "different", CloneConfig(similarity=0.8, min_size=5), delta="random", seed=3)
    assert again.state.log == res.state.log


def test_unknown_verdicts_counted_separately():
    seqs = {0: _seq(12, [K.Call]), 1: _seq(12, [K.Return])}
    res = run_loop(seqs, lambda a, b: "unknown", CloneConfig(similarity=0.8, min_size=5))
    assert res.state.unknown == 1 and res.state.fp_seen == 0 and res.state.converged


def test_irreducible_pair_reported():
    seqs = {0: _seq(12), 1: _seq(12)}
    res = run_loop(seqs, lambda a, b: "different", CloneConfig(similarity=0.8, min_size=5))
    assert res.state.irreducible == [(0, 1)]
    assert res.state.converged and res.state.fp_eliminated == 0


def test_true_positive_pair_collapses():
    seqs = {0: _seq(12, [K.Call]), 1: _seq(12, [K.Return])}
    res = run_loop(seqs, lambda a, b: "equivalent", CloneConfig(similarity=0.8, min_size=5))
    assert euclidean(res.vectors[0], res.vectors[1]) == 0.0
    assert [c.members for c in res.clusters] == [[0, 1]]
