"""Variable matching and constraint-set equivalence decisions."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .constraints import ConstraintSet, SymbolicVar, canonical_parts, simplify

DOMAIN = (-8, 8)
MAX_SEARCH_VARS = 5
ORACLE_MAX_VARS = 6


class OracleTooLarge(Exception):
    pass


@dataclass
class VarMatching:
    pairs: dict[str, str] = field(default_factory=dict)  # sid in a -> sid in b

    def __post_init__(self):
        if len(set(self.pairs.values())) != len(self.pairs):
            raise ValueError("matching is not injective")

    def inverse(self) -> "VarMatching":
        return VarMatching({b: a for a, b in self.pairs.items()})

    @staticmethod
    def identity(sids) -> "VarMatching":
        return VarMatching({s: s for s in sids})


def _by_class(symbols: Mapping[str, SymbolicVar]) -> dict[tuple, list[SymbolicVar]]:
    out: dict[tuple, list[SymbolicVar]] = {}
    for v in symbols.values():
        out.setdefault(v.match_class, []).append(v)
    for vs in out.values():
        vs.sort(key=lambda v: (v.rank, v.sid))
    return out


def match_variables(a: ConstraintSet, b: ConstraintSet, rel_a=None, rel_b=None) -> VarMatching:
    """Pair symbols class by class (target, index, bound, length, scalar, opaque
    shape), in rank order within a class. Leftovers stay unmatched."""
    ca, cb = _by_class(a.symbols), _by_class(b.symbols)
    pairs: dict[str, str] = {}
    for cls in sorted(set(ca) & set(cb), key=repr):
        for va, vb in zip(ca[cls], cb[cls]):
            pairs[va.sid] = vb.sid
    return VarMatching(pairs)


@dataclass
class EquivalenceResult:
    verdict: str  # equivalent | different | unknown
    witness: Optional[dict[str, int]] = None
    reason: str = ""


def _compile(s: ConstraintSet, order: list[str]):
    """Paths as lists of (coefficient vector, op, k) over ``order``; None = TRUE, [] = FALSE."""
    if s.unsat:
        return []
    if not s.paths:
        return None
    idx = {v: i for i, v in enumerate(order)}
    out = []
    for p in s.paths:
        atoms = []
        dead = False
        for a in p.atoms:
            kind, coeffs, k = canonical_parts(a)
            if kind == "true":
                continue
            if kind == "false":
                dead = True
                break
            vec = np.zeros(len(order), dtype=np.int64)
            for sid, c in coeffs:
                vec[idx[sid]] = c
            atoms.append((vec, kind, k))
        if not dead:
            out.append(atoms)
    return out


def _grid_truth(compiled, grid: np.ndarray) -> np.ndarray:
    if compiled is None:
        return np.ones(len(grid), dtype=bool)
    result = np.zeros(len(grid), dtype=bool)
    for atoms in compiled:
        ok = np.ones(len(grid), dtype=bool)
        for vec, kind, k in atoms:
            lhs = grid @ vec
            ok &= (lhs < k) if kind == "<" else (lhs == k)
        result |= ok
    return result


def _grid(n: int, domain: tuple[int, int]) -> np.ndarray:
    vals = np.arange(domain[0], domain[1] + 1, dtype=np.int64)
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    mesh = np.meshgrid(*([vals] * n), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def check_equivalence(a: ConstraintSet, b: ConstraintSet, m: VarMatching,
                      domain: tuple[int, int] = DOMAIN, max_vars: int = MAX_SEARCH_VARS) -> EquivalenceResult:
    """Rename ``b`` into ``a``'s symbols, then decide by canonical comparison or
    a bounded falsification search over ``domain``."""
    inv = m.inverse().pairs
    rb = b.rename(inv)
    unmatched_a = sorted(v for v in a.variables if v not in m.pairs)
    unmatched_b = sorted(v for v in b.variables if v not in inv)
    if unmatched_a or unmatched_b:
        names = [a.symbols[v].origin if v in a.symbols else v for v in unmatched_a]
        names += [b.symbols[v].origin if v in b.symbols else v for v in unmatched_b]
        return EquivalenceResult("different", None, "unmatched: " + ", ".join(names))
    sa, sb = simplify(a), simplify(rb)
    if sa.key == sb.key:
        return EquivalenceResult("equivalent", None, "canonical forms coincide")
    order = sorted(sa.variables | sb.variables)
    if len(order) > max_vars:
        return EquivalenceResult("unknown", None, f"{len(order)} variables exceed search cap")
    grid = _grid(len(order), domain)
    diff = _grid_truth(_compile(sa, order), grid) != _grid_truth(_compile(sb, order), grid)
    hits = np.flatnonzero(diff)
    if len(hits):
        row = grid[hits[0]]
        witness = {(a.symbols[v].origin if v in a.symbols else v): int(x) for v, x in zip(order, row)}
        return EquivalenceResult("different", witness, "falsified on the search domain")
    return EquivalenceResult("equivalent", None, "no assignment on the search domain separates them")


@dataclass
class BruteForceResult:
    equivalent: bool
    counterexample: Optional[dict[str, int]] = None


def brute_force_equiv(a: ConstraintSet, b: ConstraintSet, m: VarMatching,
                      domain: tuple[int, int] = DOMAIN) -> BruteForceResult:
    """Exhaustive evaluation of the raw sets, independent of the canonicalizer."""
    rb = b.rename(m.inverse().pairs)
    order = sorted(a.variables | rb.variables)
    if len(order) > ORACLE_MAX_VARS:
        raise OracleTooLarge(f"{len(order)} variables")
    values = range(domain[0], domain[1] + 1)
    for combo in itertools.product(values, repeat=len(order)):
        env = dict(zip(order, combo))
        if a.holds(env) != rb.holds(env):
            return BruteForceResult(False, env)
    return BruteForceResult(True, None)
