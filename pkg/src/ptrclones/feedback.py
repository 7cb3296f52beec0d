"""Verdict-driven re-weighting of feature vectors and the outer refinement loop."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence, Union

import numpy as np

from .cfront import NodeKind
from .clonedet import (
    CloneCluster,
    CloneConfig,
    FeatureVector,
    cluster,
    counts_from_kinds,
    distance_threshold,
    euclidean,
    uncommon_vector,
    within_threshold,
)
from .lcs import LcsDiff, lcs_diff
from .verifier import sample_cluster

MAX_ROUNDS = 64


class DeltaInvalid(ValueError):
    pass


def apply_true_positive(v_i: FeatureVector, v_j: FeatureVector, diff: LcsDiff) -> tuple[FeatureVector, FeatureVector]:
    """Both fragments collapse to the vector of their common subsequence."""
    common = counts_from_kinds(diff.common, v_i.preset)
    return (FeatureVector(common.copy(), v_i.fragment_id, v_i.preset),
            FeatureVector(common.copy(), v_j.fragment_id, v_j.preset))


@dataclass
class FalsePositiveOutcome:
    o_i: FeatureVector
    o_j: FeatureVector
    rounds: int
    separated: bool
    irreducible: bool


def _separated(o_i: FeatureVector, o_j: FeatureVector, similarity: float) -> bool:
    if o_i.size <= 0 or o_j.size <= 0:
        return True
    return not within_threshold(euclidean(o_i, o_j), distance_threshold(similarity, o_i, o_j))


def weigh_false_positive(v_i: FeatureVector, v_j: FeatureVector, diff: LcsDiff, similarity: float,
                         delta: float, max_rounds: int = MAX_ROUNDS) -> FalsePositiveOutcome:
    """Inflate the uncommon kinds of both fragments until the pair falls outside
    its threshold.

    Round r sets O = V + (delta**r - 1) * u, where u counts each fragment's
    uncommon nodes per kind, so the first round gives common + delta * uncommon.
    All uncommon kinds are weighted together in every round.
    """
    if not delta > 1.0:
        raise DeltaInvalid(f"delta must exceed 1, got {delta}")
    u_i = uncommon_vector(diff.uncommon_a, v_i.preset).astype(float)
    u_j = uncommon_vector(diff.uncommon_b, v_j.preset).astype(float)
    base_i = np.asarray(v_i.counts, dtype=float)
    base_j = np.asarray(v_j.counts, dtype=float)
    if (not u_i.any() and not u_j.any()) or np.array_equal(u_i, u_j):
        return FalsePositiveOutcome(v_i, v_j, 0, _separated(v_i, v_j, similarity), True)
    o_i, o_j = v_i, v_j
    for r in range(1, max_rounds + 1):
        scale = delta ** r - 1.0
        o_i = FeatureVector(base_i + scale * u_i, v_i.fragment_id, v_i.preset)
        o_j = FeatureVector(base_j + scale * u_j, v_j.fragment_id, v_j.preset)
        if _separated(o_i, o_j, similarity):
            return FalsePositiveOutcome(o_i, o_j, r, True, False)
    return FalsePositiveOutcome(o_i, o_j, max_rounds, False, True)


def apply_false_positive(v_i: FeatureVector, v_j: FeatureVector, diff: LcsDiff, similarity: float,
                         delta: float) -> tuple[FeatureVector, FeatureVector]:
    out = weigh_false_positive(v_i, v_j, diff, similarity, delta)
    return out.o_i, out.o_j


@dataclass
class VectorOverride:
    fragment_id: int
    adjusted: FeatureVector
    provenance: list[tuple[int, int, float]] = field(default_factory=list)


@dataclass
class FeedbackState:
    iteration: int = 0
    overrides: dict[int, VectorOverride] = field(default_factory=dict)
    fp_seen: int = 0
    fp_eliminated: int = 0
    converged: bool = False
    convergence_iteration: Optional[int] = None
    unknown: int = 0
    irreducible: list[tuple[int, int]] = field(default_factory=list)
    log: list[dict] = field(default_factory=list)
    verdicts: dict[tuple[int, int], object] = field(default_factory=dict)


@dataclass
class LoopResult:
    state: FeedbackState
    clusters: list[CloneCluster]
    vectors: dict[int, FeatureVector]


def derive_seed(*parts: object) -> int:
    h = hashlib.sha256(":".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(h[:8], "little")


def _verdict_of(result) -> str:
    return result if isinstance(result, str) else result.verdict


class _Store:
    """Current kind sequence and accumulated weight of every fragment."""

    def __init__(self, sequences: Mapping[int, Sequence[NodeKind]], preset: str):
        self.preset = preset
        self.original = {f: list(s) for f, s in sequences.items()}
        self.seq = {f: list(s) for f, s in sequences.items()}
        self.weight = {f: np.zeros(len(counts_from_kinds((), preset))) for f in sequences}
        self.provenance: dict[int, list[tuple[int, int, float]]] = {}

    def vector(self, f: int) -> FeatureVector:
        counts = counts_from_kinds(self.seq[f], self.preset)
        w = self.weight[f]
        if not w.any():
            return FeatureVector(counts, f, self.preset)
        return FeatureVector(counts + w, f, self.preset)

    def changed(self, f: int) -> bool:
        return self.seq[f] != self.original[f] or bool(self.weight[f].any())


def run_loop(sequences: Mapping[int, Sequence[NodeKind]],
             verify: Callable[[int, int], Union[str, object]],
             config: CloneConfig,
             delta: Union[float, str] = 2.0,
             max_iters: int = 10,
             seed: int = 0) -> LoopResult:
    """Cluster, sample, verify, adjust and re-cluster until an iteration neither
    observes a new false positive nor eliminates one."""
    if delta != "random" and not float(delta) > 1.0:
        raise DeltaInvalid(f"delta must exceed 1, got {delta}")
    store = _Store(sequences, config.preset)
    admitted = sorted(f for f in store.seq if store.vector(f).size >= config.min_size)
    recluster_cfg = CloneConfig(config.similarity, 1, config.preset, config.mode,
                                config.lsh_tables, config.lsh_width, config.seed)
    state = FeedbackState()
    rng = np.random.default_rng(derive_seed(seed, "delta"))
    seen: set[tuple[int, int]] = set()
    eliminated: set[tuple[int, int]] = set()
    irreducible: set[tuple[int, int]] = set()

    def current() -> list[FeatureVector]:
        return [store.vector(f) for f in admitted]

    clusters = cluster(current(), recluster_cfg)
    for it in range(1, max_iters + 1):
        state.iteration = it
        d = float(3.0 - 2.0 * rng.uniform()) if delta == "random" else float(delta)
        vmap = {f: np.asarray(store.vector(f).counts, dtype=float) for f in admitted}
        pairs: list[tuple[int, int]] = []
        for ci, c in enumerate(clusters):
            pairs += sample_cluster(c, seed=derive_seed(seed, it, ci), vectors=vmap)
        tp = fp = new_fp = elim = unknown = 0
        for a, b in pairs:
            key = (min(a, b), max(a, b))
            if key not in state.verdicts:
                state.verdicts[key] = verify(*key)
            verdict = _verdict_of(state.verdicts[key])
            if verdict == "unknown":
                unknown += 1
                continue
            diff = lcs_diff(store.seq[key[0]], store.seq[key[1]])
            if verdict == "equivalent":
                tp += 1
                if diff.uncommon_a or diff.uncommon_b:
                    for f in key:
                        store.seq[f] = list(diff.common)
                        store.provenance.setdefault(f, []).append((it, key[1] if f == key[0] else key[0], 0.0))
                continue
            va, vb = store.vector(key[0]), store.vector(key[1])
            if not is_direct(va, vb, config.similarity):
                continue  # joined only through third parties
            fp += 1
            if key not in seen:
                seen.add(key)
                new_fp += 1
            if key in irreducible:
                continue
            eliminated.discard(key)
            out = weigh_false_positive(va, vb, diff, config.similarity, d)
            if out.separated and not out.irreducible:
                store.weight[key[0]] += np.asarray(out.o_i.counts, dtype=float) - va.counts
                store.weight[key[1]] += np.asarray(out.o_j.counts, dtype=float) - vb.counts
                store.provenance.setdefault(key[0], []).append((it, key[1], d))
                store.provenance.setdefault(key[1], []).append((it, key[0], d))
                eliminated.add(key)
                elim += 1
            else:
                irreducible.add(key)
        clusters = cluster(current(), recluster_cfg)
        state.unknown += unknown
        state.log.append({
            "iteration": it, "pairs_sampled": len(pairs), "tp": tp, "fp": fp,
            "fp_eliminated": elim, "irreducible": len(irreducible), "clusters": len(clusters),
            "unknown": unknown, "delta": d,
        })
        if new_fp == 0 and elim == 0:
            state.converged = True
            state.convergence_iteration = it
            break
    state.fp_seen = len(seen)
    state.fp_eliminated = len(eliminated)
    state.irreducible = sorted(irreducible)
    for f in admitted:
        if store.changed(f):
            state.overrides[f] = VectorOverride(f, store.vector(f), store.provenance.get(f, []))
    return LoopResult(state, clusters, {f: store.vector(f) for f in admitted})


def is_direct(v_i: FeatureVector, v_j: FeatureVector, similarity: float) -> bool:
    """Is the pair itself within threshold, not merely linked through a cluster?"""
    return not _separated(v_i, v_j, similarity)
