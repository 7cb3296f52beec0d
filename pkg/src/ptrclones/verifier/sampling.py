"""Picking representative clone pairs out of a cluster."""

from __future__ import annotations

import itertools
import math
from typing import Mapping, Optional

import numpy as np


def sample_cluster(cluster, k: Optional[int] = None, seed: int = 0,
                   vectors: Optional[Mapping[int, np.ndarray]] = None) -> list[tuple[int, int]]:
    """Split the cluster around seeded random centers (one refinement pass),
    keep each group's medoid and its farthest member, and pair up the picks.

    Without ``vectors`` members are placed on a line in id order.
    """
    members = sorted(getattr(cluster, "members", cluster))
    n = len(members)
    if n < 2:
        raise ValueError("a cluster needs at least two members")
    if n == 2:
        return [(members[0], members[1])]
    k = math.ceil(math.sqrt(n)) if k is None else max(1, min(int(k), n))
    if vectors is not None:
        X = np.vstack([np.asarray(vectors[m], dtype=float) for m in members])
    else:
        X = np.arange(n, dtype=float).reshape(-1, 1)
    D = np.linalg.norm(X[:, None, :] - X[None, :, :], axis=2)
    rng = np.random.default_rng(seed)
    centers = sorted(rng.choice(n, size=k, replace=False).tolist())

    def assign(cs: list[int]) -> np.ndarray:
        return np.argmin(D[:, cs], axis=1)

    labels = assign(centers)
    # one refinement: move each center to its group's medoid
    refined = []
    for g in range(len(centers)):
        idx = np.flatnonzero(labels == g)
        if len(idx):
            refined.append(int(idx[np.argmin(D[np.ix_(idx, idx)].sum(axis=1))]))
    centers = sorted(set(refined))
    labels = assign(centers)

    picks: set[int] = set()
    for g in range(len(centers)):
        idx = np.flatnonzero(labels == g)
        if not len(idx):
            continue
        medoid = int(idx[np.argmin(D[np.ix_(idx, idx)].sum(axis=1))])
        picks.add(medoid)
        if len(idx) > 1:
            far = int(idx[np.argmax(D[medoid, idx])])
            picks.add(far)
    chosen = sorted(members[i] for i in picks)
    if len(chosen) < 2:
        chosen = members[:2]
    return list(itertools.combinations(chosen, 2))
