"""Sampling of clone pairs, constraint extraction and equivalence checking."""

from dataclasses import dataclass, field
from typing import Optional

from .constraints import (
    AtomicCondition,
    ConstraintSet,
    LinearTerm,
    PathCondition,
    SymbolicVar,
    canonical_atom,
    simplify,
)
from .equivalence import (
    DOMAIN,
    BruteForceResult,
    EquivalenceResult,
    OracleTooLarge,
    VarMatching,
    brute_force_equiv,
    check_equivalence,
    match_variables,
)
from .paths import PATH_CAP, Block, PathExplosion, enumerate_paths, extract_constraints
from .sampling import sample_cluster


@dataclass
class VerdictRecord:
    pair: tuple[int, int]
    verdict: str
    witness: Optional[dict] = None
    paths_a: int = 0
    paths_b: int = 0
    reason: str = ""
    constraints: tuple[str, str] = field(default=("", ""))

    def to_json(self) -> dict:
        out = {"pair": list(self.pair), "verdict": self.verdict}
        if self.witness is not None:
            out["witness"] = dict(sorted(self.witness.items()))
        out["paths_a"] = self.paths_a
        out["paths_b"] = self.paths_b
        out["reason"] = self.reason
        out["constraints"] = list(self.constraints)
        return out


def verify_fragments(frag_a, rel_a, frag_b, rel_b, domain=DOMAIN) -> VerdictRecord:
    """Full three-step check for one sampled pair."""
    pair = (frag_a.fragment_id, frag_b.fragment_id)
    try:
        ca = extract_constraints(frag_a, rel_a)
        cb = extract_constraints(frag_b, rel_b)
    except PathExplosion as exc:
        return VerdictRecord(pair, "unknown", reason=str(exc))
    m = match_variables(ca, cb, rel_a, rel_b)
    res = check_equivalence(ca, cb, m, domain)
    sa, sb = simplify(ca), simplify(cb)
    return VerdictRecord(pair, res.verdict, res.witness, len(sa.paths), len(sb.paths),
                         res.reason, (str(sa), str(sb)))


__all__ = [
    "AtomicCondition", "ConstraintSet", "LinearTerm", "PathCondition", "SymbolicVar",
    "canonical_atom", "simplify", "DOMAIN", "BruteForceResult", "EquivalenceResult",
    "OracleTooLarge", "VarMatching", "brute_force_equiv", "check_equivalence",
    "match_variables", "PATH_CAP", "Block", "PathExplosion", "enumerate_paths",
    "extract_constraints", "sample_cluster", "VerdictRecord", "verify_fragments",
]
