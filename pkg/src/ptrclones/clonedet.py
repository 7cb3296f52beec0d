"""Feature-vector embedding, similarity threshold and clustering of fragments."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial.distance import pdist

from .cfront import AstNode, NodeKind, post_order
from .lcs import lcs_length

PRESETS: dict[str, tuple[NodeKind, ...]] = {
    "paper9": (
        NodeKind.ID, NodeKind.Constant, NodeKind.ArrayRef, NodeKind.Assignment, NodeKind.StructRef,
        NodeKind.BinaryOp, NodeKind.UnaryOp, NodeKind.Compound, NodeKind.For,
    ),
    "full": tuple(NodeKind),
}

# absorbs float noise in 2(1 - S) for S like 0.8
_SLACK = 1e-9


class PresetMismatch(ValueError):
    pass


@dataclass
class FeatureVector:
    counts: np.ndarray
    fragment_id: int = -1
    preset: str = "full"

    def __post_init__(self):
        self.counts = np.asarray(self.counts)
        if len(self.counts) != len(PRESETS[self.preset]):
            raise PresetMismatch(f"{len(self.counts)} counts for preset {self.preset}")
        if np.any(self.counts < 0):
            raise ValueError("negative feature count")

    @property
    def size(self) -> float:
        s = self.counts.sum()
        return int(s) if np.issubdtype(self.counts.dtype, np.integer) else float(s)

    def __add__(self, other: "FeatureVector") -> "FeatureVector":
        if self.preset != other.preset:
            raise PresetMismatch(f"{self.preset} vs {other.preset}")
        return FeatureVector(self.counts + other.counts, self.fragment_id, self.preset)

    def as_text(self) -> str:
        vals = ",".join(_fmt(c) for c in self.counts)
        return f"{self.fragment_id}: {vals}"


def _fmt(c) -> str:
    c = float(c)
    return str(int(c)) if c.is_integer() else f"{c:g}"


@dataclass
class CloneConfig:
    similarity: float = 0.8
    min_size: int = 10
    preset: str = "full"
    mode: str = "exact"
    lsh_tables: int = 8
    lsh_width: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.similarity <= 1:
            raise ValueError("similarity must lie in (0, 1]")
        if self.min_size < 1:
            raise ValueError("min_size must be >= 1")
        if self.lsh_tables < 1:
            raise ValueError("lsh_tables must be >= 1")
        if self.preset not in PRESETS:
            raise ValueError(f"unknown preset {self.preset!r}")
        if self.mode not in ("exact", "lsh"):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class CloneCluster:
    members: list[int]
    pairwise: list[tuple[int, int, float]] = field(default_factory=list)

    @property
    def pair_set(self) -> set[tuple[int, int]]:
        return {(a, b) for a, b, _ in self.pairwise}


def counts_from_kinds(kinds: Iterable[NodeKind], preset: str = "full") -> np.ndarray:
    dims = PRESETS[preset]
    index = {k: i for i, k in enumerate(dims)}
    counts = np.zeros(len(dims), dtype=np.int64)
    for k in kinds:
        i = index.get(k)
        if i is not None:
            counts[i] += 1
    return counts


def vectorize(tree: AstNode, preset: str = "full", fragment_id: int = -1) -> FeatureVector:
    return FeatureVector(counts_from_kinds((k for k, _ in post_order(tree)), preset), fragment_id, preset)


def vectorize_kinds(kinds: Iterable[NodeKind], preset: str = "full", fragment_id: int = -1) -> FeatureVector:
    return FeatureVector(counts_from_kinds(kinds, preset), fragment_id, preset)


def vectorize_fragment(fragment, preset: str = "full") -> FeatureVector:
    """Sum of statement vectors; the synthetic fragment root is not counted."""
    return vectorize_kinds(fragment.kind_sequence(), preset, fragment.fragment_id)


def similarity_from_counts(shared: int, left: int, right: int) -> float:
    denom = 2 * shared + left + right
    return 0.0 if denom == 0 else 2 * shared / denom


def tree_similarity(t1, t2) -> float:
    """2*shared / (2*shared + L + R) with shared = LCS of post-order kind sequences.

    Accepts trees or ready-made kind sequences.
    """
    a = [k for k, _ in post_order(t1)] if isinstance(t1, AstNode) else list(t1)
    b = [k for k, _ in post_order(t2)] if isinstance(t2, AstNode) else list(t2)
    shared = lcs_length(a, b)
    return similarity_from_counts(shared, len(a) - shared, len(b) - shared)


def threshold_from_sizes(similarity: float, size_a: float, size_b: float) -> float:
    return math.sqrt(2.0 * (1.0 - similarity) * min(size_a, size_b))


def distance_threshold(similarity: float, v1: FeatureVector, v2: FeatureVector) -> float:
    if v1.size <= 0 or v2.size <= 0:
        raise ValueError("vector sizes must be positive")
    return threshold_from_sizes(similarity, v1.size, v2.size)


def euclidean(v1: FeatureVector, v2: FeatureVector) -> float:
    a = np.asarray(getattr(v1, "counts", v1), dtype=float)
    b = np.asarray(getattr(v2, "counts", v2), dtype=float)
    if a.shape != b.shape:
        raise PresetMismatch(f"vector lengths {a.shape} and {b.shape} differ")
    return float(np.linalg.norm(a - b))


def within_threshold(distance: float, threshold: float) -> bool:
    return distance * distance <= threshold * threshold + _SLACK


def is_clone_pair(v1: FeatureVector, v2: FeatureVector, similarity: float) -> bool:
    return within_threshold(euclidean(v1, v2), distance_threshold(similarity, v1, v2))


def _matrix(vectors: Sequence[FeatureVector]) -> tuple[np.ndarray, np.ndarray, list[int]]:
    presets = {v.preset for v in vectors}
    if len(presets) > 1:
        raise PresetMismatch(f"mixed presets {sorted(presets)}")
    X = np.vstack([np.asarray(v.counts, dtype=float) for v in vectors])
    sizes = X.sum(axis=1)
    return X, sizes, [v.fragment_id for v in vectors]


def _components(n: int, edges: list[tuple[int, int, float]], ids: list[int]) -> list[CloneCluster]:
    if not edges:
        return []
    rows = [a for a, _, _ in edges]
    cols = [b for _, b, _ in edges]
    graph = coo_matrix((np.ones(len(edges)), (rows, cols)), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    groups: dict[int, list[int]] = {}
    for idx, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(idx)
    by_label: dict[int, list[tuple[int, int, float]]] = {}
    for a, b, d in edges:
        by_label.setdefault(int(labels[a]), []).append((a, b, d))
    clusters = []
    for lab, idxs in groups.items():
        if len(idxs) < 2:
            continue
        members = sorted(ids[i] for i in idxs)
        pairs = sorted(
            (min(ids[a], ids[b]), max(ids[a], ids[b]), d) for a, b, d in by_label.get(lab, [])
        )
        clusters.append(CloneCluster(members, pairs))
    clusters.sort(key=lambda c: c.members[0])
    return clusters


def _admitted(vectors: Sequence[FeatureVector], config: CloneConfig) -> list[FeatureVector]:
    return [v for v in vectors if v.size >= config.min_size]


def cluster_exact(vectors: Sequence[FeatureVector], config: CloneConfig) -> list[CloneCluster]:
    """Connected components of the graph joining every pair within threshold."""
    vectors = _admitted(vectors, config)
    if len(vectors) < 2:
        return []
    X, sizes, ids = _matrix(vectors)
    n = len(vectors)
    dist = pdist(X)
    iu, ju = np.triu_indices(n, k=1)
    thr = np.sqrt(2.0 * (1.0 - config.similarity) * np.minimum(sizes[iu], sizes[ju]))
    ok = dist * dist <= thr * thr + _SLACK
    edges = [(int(a), int(b), float(d)) for a, b, d in zip(iu[ok], ju[ok], dist[ok])]
    return _components(n, edges, ids)


def default_lsh_width(sizes: np.ndarray, similarity: float) -> float:
    """Twice the median per-vector threshold."""
    med = float(np.median(np.sqrt(2.0 * (1.0 - similarity) * sizes)))
    return 2.0 * med


def lsh_candidates(X: np.ndarray, tables: int, width: float, seed: int) -> set[tuple[int, int]]:
    """Pairs sharing a bucket of a seeded p-stable (Gaussian) projection in any table."""
    n, dim = X.shape
    rng = np.random.default_rng(seed)
    cands: set[tuple[int, int]] = set()
    for _ in range(tables):
        a = rng.normal(size=dim)
        b = rng.uniform(0.0, width) if width > 0 else 0.0
        if width > 0:
            keys = np.floor((X @ a + b) / width).astype(np.int64).tolist()
        else:
            keys = [tuple(row) for row in X.tolist()]
        buckets: dict = {}
        for idx, key in enumerate(keys):
            buckets.setdefault(key, []).append(idx)
        for members in buckets.values():
            for x in range(len(members)):
                for y in range(x + 1, len(members)):
                    cands.add((members[x], members[y]))
    return cands


def cluster_lsh(vectors: Sequence[FeatureVector], config: CloneConfig) -> list[CloneCluster]:
    """LSH candidate generation followed by exact threshold verification."""
    vectors = _admitted(vectors, config)
    if len(vectors) < 2:
        return []
    X, sizes, ids = _matrix(vectors)
    width = config.lsh_width if config.lsh_width is not None else default_lsh_width(sizes, config.similarity)
    edges = []
    for a, b in sorted(lsh_candidates(X, config.lsh_tables, width, config.seed)):
        d = float(np.linalg.norm(X[a] - X[b]))
        if within_threshold(d, threshold_from_sizes(config.similarity, sizes[a], sizes[b])):
            edges.append((a, b, d))
    return _components(len(vectors), edges, ids)


def cluster(vectors: Sequence[FeatureVector], config: CloneConfig) -> list[CloneCluster]:
    return cluster_lsh(vectors, config) if config.mode == "lsh" else cluster_exact(vectors, config)


def all_pairs(clusters: Iterable[CloneCluster]) -> set[tuple[int, int]]:
    out: set[tuple[int, int]] = set()
    for c in clusters:
        out |= c.pair_set
    return out


def uncommon_vector(uncommon: Counter, preset: str) -> np.ndarray:
    return counts_from_kinds(uncommon.elements(), preset)


def vector_map(vectors: Iterable[FeatureVector]) -> Mapping[int, np.ndarray]:
    return {v.fragment_id: np.asarray(v.counts, dtype=float) for v in vectors}
