import itertools

from hypothesis import given, settings
from hypothesis import strategies as st

from ptrclones.cfront import NodeKind
from ptrclones.lcs import lcs_diff, lcs_length

kinds = st.sampled_from(list(NodeKind)[:4])
seqs = st.lists(kinds, max_size=8)


def brute_lcs(a, b) -> int:
    """Longest subsequence of ``a`` that is also a subsequence of ``b``."""
    def is_subseq(s, t):
        it = iter(t)
        return all(x in it for x in s)
    for r in range(len(a), -1, -1):
        for idx in itertools.combinations(range(len(a)), r):
            if is_subseq([a[i] for i in idx], b):
                return r
    return 0


@settings(max_examples=150, deadline=None)
@given(seqs, seqs)
def test_lcs_length_matches_enumeration(a, b):
    assert lcs_length(a, b) == brute_lcs(a, b)


@settings(max_examples=150, deadline=None)
@given(seqs, seqs)
def test_diff_partitions_both_sequences(a, b):
    d = lcs_diff(a, b)
    assert len(d.common) == lcs_length(a, b)
    assert len(d.common) + sum(d.uncommon_a.values()) == len(a)
    assert len(d.common) + sum(d.uncommon_b.values()) == len(b)
    assert [a[i] for i in d.kept_a] == list(d.common) == [b[j] for j in d.kept_b]


def test_identical_sequences_have_no_uncommon():
    s = [NodeKind.ID, NodeKind.Constant, NodeKind.Assignment]
    d = lcs_diff(s, s)
    assert not d.uncommon_a and not d.uncommon_b


def test_disjoint_sequences():
    a = [NodeKind.ID, NodeKind.ID]
    b = [NodeKind.For]
    d = lcs_diff(a, b)
    assert d.common == ()
    assert d.uncommon_a[NodeKind.ID] == 2 and d.uncommon_b[NodeKind.For] == 1
