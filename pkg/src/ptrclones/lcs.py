"""Longest common subsequence over node-kind sequences."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np


def lcs_table(a: Sequence, b: Sequence) -> np.ndarray:
    n, m = len(a), len(b)
    table = np.zeros((n + 1, m + 1), dtype=np.int32)
    b_arr = np.asarray([int(x) for x in b], dtype=np.int64)
    for i in range(1, n + 1):
        match = b_arr == int(a[i - 1])
        prev = table[i - 1]
        row = table[i]
        diag = np.where(match, prev[:-1] + 1, 0)
        # row[j] = max(diag[j-1], prev[j], row[j-1]) -- running max handles row[j-1]
        cand = np.maximum(diag, prev[1:])
        row[1:] = np.maximum.accumulate(cand)
    return table


def lcs_length(a: Sequence, b: Sequence) -> int:
    if not a or not b:
        return 0
    return int(lcs_table(a, b)[-1, -1])


@dataclass(frozen=True)
class LcsDiff:
    common: tuple
    uncommon_a: Counter
    uncommon_b: Counter
    kept_a: tuple[int, ...]
    kept_b: tuple[int, ...]


def lcs_diff(a_seq: Sequence, b_seq: Sequence) -> LcsDiff:
    """One longest common subsequence plus the multisets left over on each side.

    Backtracking prefers skipping in ``a`` first, which makes the alignment
    deterministic.
    """
    a, b = list(a_seq), list(b_seq)
    table = lcs_table(a, b) if a and b else np.zeros((len(a) + 1, len(b) + 1), dtype=np.int32)
    i, j = len(a), len(b)
    kept_a: list[int] = []
    kept_b: list[int] = []
    while i > 0 and j > 0:
        if int(a[i - 1]) == int(b[j - 1]) and table[i, j] == table[i - 1, j - 1] + 1:
            kept_a.append(i - 1)
            kept_b.append(j - 1)
            i -= 1
            j -= 1
        elif table[i - 1, j] >= table[i, j - 1]:
            i -= 1
        else:
            j -= 1
    kept_a.reverse()
    kept_b.reverse()
    ka, kb = set(kept_a), set(kept_b)
    common = tuple(a[x] for x in kept_a)
    ua = Counter(a[x] for x in range(len(a)) if x not in ka)
    ub = Counter(b[x] for x in range(len(b)) if x not in kb)
    return LcsDiff(common, ua, ub, tuple(kept_a), tuple(kept_b))
