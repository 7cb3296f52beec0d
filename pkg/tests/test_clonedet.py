import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptrclones.cfront import NodeKind, parse_source
from ptrclones.clonedet import (
    CloneConfig,
    FeatureVector,
    PRESETS,
    PresetMismatch,
    all_pairs,
    cluster,
    cluster_exact,
    cluster_lsh,
    distance_threshold,
    euclidean,
    is_clone_pair,
    threshold_from_sizes,
    tree_similarity,
    vectorize,
    vectorize_fragment,
    vectorize_kinds,
)

from conftest import load_fragment
from corpora import vector_corpus

A = [7, 2, 2, 2, 0, 1, 1, 1, 1]
B = [8, 1, 1, 2, 1, 1, 1, 1, 1]


def fv(counts, fid=0, preset="paper9"):
    return FeatureVector(np.array(counts), fid, preset)


def test_fig3_vectors_under_nine_kinds():
    a, _ = load_fragment("fig3/mgau_eval.c", "active")
    b, _ = load_fragment("fig3/lextree_histbin.c", "list")
    assert vectorize_fragment(a, "paper9").counts.tolist() == A
    assert vectorize_fragment(b, "paper9").counts.tolist() == B


def test_worked_pair_distance_and_threshold():
    a, b = fv(A, 0), fv(B, 1)
    assert a.size == b.size == 17
    assert euclidean(a, b) == pytest.approx(2.0, abs=1e-12)
    assert distance_threshold(0.75, a, b) == pytest.approx(math.sqrt(8.5), abs=1e-12)
    assert is_clone_pair(a, b, 0.75)


def test_threshold_uses_smaller_size():
    assert threshold_from_sizes(0.75, 16, 40) == pytest.approx(math.sqrt(8.0))


def test_high_similarity_rejects_worked_pair():
    a, b = fv(A, 0), fv(B, 1)
    assert distance_threshold(0.95, a, b) == pytest.approx(math.sqrt(1.7))
    assert not is_clone_pair(a, b, 0.95)
    assert cluster_exact([a, b], CloneConfig(similarity=0.95, min_size=1, preset="paper9")) == []


def test_euclidean_three_four_five():
    assert euclidean(np.array([0, 0]), np.array([3, 4])) == 5.0


def test_vectorize_simple_statement():
    fn = parse_source("void f(int b){ int a; a = b + 1; }")[0]
    v = vectorize(fn.body.children[1], "paper9")
    assert v.counts.tolist() == [2, 1, 0, 1, 0, 1, 0, 0, 0]


def test_preset_mismatch():
    with pytest.raises(PresetMismatch):
        FeatureVector(np.zeros(5), 0, "paper9")
    with pytest.raises(PresetMismatch):
        fv(A) + FeatureVector(np.zeros(len(PRESETS["full"])), 0, "full")


def test_negative_counts_rejected():
    with pytest.raises(ValueError):
        fv([-1, 0, 0, 0, 0, 0, 0, 0, 0])


def test_config_validation():
    with pytest.raises(ValueError):
        CloneConfig(similarity=0.0)
    with pytest.raises(ValueError):
        CloneConfig(mode="fuzzy")
    with pytest.raises(ValueError):
        CloneConfig(preset="bogus")


def test_min_size_filters_small_fragments():
    small = [fv([1, 0, 0, 0, 0, 0, 0, 0, 0], i) for i in range(3)]
    assert cluster_exact(small, CloneConfig(similarity=0.8, min_size=2, preset="paper9")) == []


def test_clusters_are_connected_components():
    # 0~1 and 1~2 are clones, 0 and 2 are not: one cluster of three
    vs = [fv([10, 0, 0, 0, 0, 0, 0, 0, 0], 0), fv([10, 2, 0, 0, 0, 0, 0, 0, 0], 1),
          fv([10, 4, 0, 0, 0, 0, 0, 0, 0], 2), fv([0, 0, 0, 0, 0, 0, 0, 0, 30], 3)]
    cfg = CloneConfig(similarity=0.8, min_size=1, preset="paper9")
    cs = cluster_exact(vs, cfg)
    assert [c.members for c in cs] == [[0, 1, 2]]
    assert cs[0].pair_set == {(0, 1), (1, 2)}


def test_identical_vectors_cluster_at_similarity_one():
    vs = [fv(A, 0), fv(A, 1), fv(B, 2)]
    cs = cluster(vs, CloneConfig(similarity=1.0, min_size=1, preset="paper9"))
    assert all_pairs(cs) == {(0, 1)}


@pytest.mark.parametrize("seed", range(3))
def test_lsh_pairs_subset_of_exact(seed):
    vs = vector_corpus(seed, n=120)
    cfg = CloneConfig(similarity=0.8, min_size=1, mode="lsh", seed=seed)
    exact = all_pairs(cluster_exact(vs, cfg))
    approx = all_pairs(cluster_lsh(vs, cfg))
    assert approx <= exact
    assert len(approx) >= 0.9 * len(exact)


def test_lsh_is_deterministic():
    vs = vector_corpus(7, n=80)
    cfg = CloneConfig(similarity=0.8, min_size=1, mode="lsh", seed=3)
    assert all_pairs(cluster_lsh(vs, cfg)) == all_pairs(cluster_lsh(vs, cfg))


kind_lists = st.lists(st.sampled_from(list(NodeKind)), max_size=30)


@settings(max_examples=100, deadline=None)
@given(kind_lists, kind_lists)
def test_vector_additivity(a, b):
    whole = vectorize_kinds(a + b)
    parts = vectorize_kinds(a) + vectorize_kinds(b)
    assert whole.counts.tolist() == parts.counts.tolist()


@settings(max_examples=100, deadline=None)
@given(kind_lists, kind_lists)
def test_similarity_symmetric_and_bounded(a, b):
    s = tree_similarity(a, b)
    assert s == tree_similarity(b, a)
    assert 0.0 <= s <= 1.0


@settings(max_examples=50, deadline=None)
@given(kind_lists.filter(bool))
def test_similarity_identity(a):
    assert tree_similarity(a, a) == 1.0


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 1.0), st.integers(1, 500), st.integers(1, 500))
def test_threshold_formula(s, x, y):
    assert threshold_from_sizes(s, x, y) == pytest.approx(math.sqrt(2 * (1 - s) * min(x, y)))
