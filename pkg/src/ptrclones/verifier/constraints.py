"""Linear integer constraints over symbolic variables and their canonical forms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional

OPS = ("<", "<=", "=", ">=", ">")


@dataclass(frozen=True)
class SymbolicVar:
    sid: str
    origin: str
    role: str  # target | index | bound | length_of | scalar | opaque
    fragment_id: int
    pointer: Optional[str] = None
    depth: Optional[int] = None
    shape: Optional[str] = None
    rank: tuple = ()

    @property
    def match_class(self) -> tuple:
        if self.role == "length_of":
            return ("length_of", self.depth)
        if self.role == "opaque":
            return ("opaque", self.shape)
        return (self.role,)


@dataclass(frozen=True)
class LinearTerm:
    coeffs: tuple[tuple[str, int], ...] = ()
    const: int = 0

    @staticmethod
    def of(coeffs: Mapping[str, int], const: int = 0) -> "LinearTerm":
        return LinearTerm(tuple(sorted((s, int(c)) for s, c in coeffs.items() if c)), int(const))

    @staticmethod
    def var(sid: str, coef: int = 1) -> "LinearTerm":
        return LinearTerm.of({sid: coef})

    @staticmethod
    def constant(value: int) -> "LinearTerm":
        return LinearTerm((), int(value))

    def as_dict(self) -> dict[str, int]:
        return dict(self.coeffs)

    def __add__(self, other: "LinearTerm") -> "LinearTerm":
        d = self.as_dict()
        for s, c in other.coeffs:
            d[s] = d.get(s, 0) + c
        return LinearTerm.of(d, self.const + other.const)

    def __neg__(self) -> "LinearTerm":
        return LinearTerm(tuple((s, -c) for s, c in self.coeffs), -self.const)

    def __sub__(self, other: "LinearTerm") -> "LinearTerm":
        return self + (-other)

    def scale(self, k: int) -> "LinearTerm":
        return LinearTerm.of({s: c * k for s, c in self.coeffs}, self.const * k)

    @property
    def variables(self) -> set[str]:
        return {s for s, _ in self.coeffs}

    def evaluate(self, assignment: Mapping[str, int]) -> int:
        return self.const + sum(c * assignment[s] for s, c in self.coeffs)

    def rename(self, mapping: Mapping[str, str]) -> "LinearTerm":
        d: dict[str, int] = {}
        for s, c in self.coeffs:
            t = mapping.get(s, s)
            d[t] = d.get(t, 0) + c
        return LinearTerm.of(d, self.const)

    def __str__(self) -> str:
        parts = []
        for s, c in self.coeffs:
            name = s.split(":", 1)[-1]
            if c == 1:
                parts.append(f"+ {name}")
            elif c == -1:
                parts.append(f"- {name}")
            else:
                parts.append(f"{'+' if c > 0 else '-'} {abs(c)}*{name}")
        if self.const or not parts:
            parts.append(f"{'+' if self.const >= 0 else '-'} {abs(self.const)}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


@dataclass(frozen=True)
class AtomicCondition:
    lhs: LinearTerm
    op: str
    rhs: LinearTerm

    def __post_init__(self):
        if self.op not in OPS:
            raise ValueError(f"unknown comparison {self.op!r}")
        if not (self.lhs.variables or self.rhs.variables):
            raise ValueError("an atomic condition needs at least one variable")

    @property
    def variables(self) -> set[str]:
        return self.lhs.variables | self.rhs.variables

    def holds(self, assignment: Mapping[str, int]) -> bool:
        a = self.lhs.evaluate(assignment)
        b = self.rhs.evaluate(assignment)
        return {"<": a < b, "<=": a <= b, "=": a == b, ">=": a >= b, ">": a > b}[self.op]

    def rename(self, mapping: Mapping[str, str]) -> "AtomicCondition":
        return AtomicCondition(self.lhs.rename(mapping), self.op, self.rhs.rename(mapping))

    @property
    def key(self) -> tuple:
        return (self.lhs.coeffs, self.lhs.const, self.op, self.rhs.coeffs, self.rhs.const)

    def __str__(self) -> str:
        diff = self.lhs - self.rhs
        pos = LinearTerm(tuple((s, c) for s, c in diff.coeffs if c > 0))
        neg = LinearTerm(tuple((s, -c) for s, c in diff.coeffs if c < 0), -diff.const)
        op = {"<=": "≤", ">=": "≥"}.get(self.op, self.op)
        if not pos.coeffs:
            pos, neg = neg, pos
            op = {"<": ">", ">": "<", "≤": "≥", "≥": "≤"}.get(op, op)
        return f"{pos} {op} {neg}"


@dataclass(frozen=True)
class PathCondition:
    atoms: tuple[AtomicCondition, ...]
    path_id: int = 0

    def holds(self, assignment: Mapping[str, int]) -> bool:
        return all(a.holds(assignment) for a in self.atoms)

    @property
    def key(self) -> frozenset:
        return frozenset(a.key for a in self.atoms)

    def __str__(self) -> str:
        return " ∧ ".join("{" + str(a) + "}" for a in self.atoms) or "true"


@dataclass
class ConstraintSet:
    """Union of path conditions. No paths means unconstrained; ``unsat`` marks
    a set in which every path is contradictory."""

    paths: tuple[PathCondition, ...] = ()
    fragment_id: int = -1
    symbols: dict[str, SymbolicVar] = field(default_factory=dict)
    unsat: bool = False

    @property
    def variables(self) -> set[str]:
        out: set[str] = set()
        for p in self.paths:
            for a in p.atoms:
                out |= a.variables
        return out

    def holds(self, assignment: Mapping[str, int]) -> bool:
        if self.unsat:
            return False
        if not self.paths:
            return True
        return any(p.holds(assignment) for p in self.paths)

    @property
    def key(self) -> tuple:
        return (self.unsat, frozenset(p.key for p in self.paths))

    def rename(self, mapping: Mapping[str, str]) -> "ConstraintSet":
        paths = tuple(
            PathCondition(tuple(a.rename(mapping) for a in p.atoms), p.path_id) for p in self.paths
        )
        symbols = {mapping.get(s, s): v for s, v in self.symbols.items()}
        return ConstraintSet(paths, self.fragment_id, symbols, self.unsat)

    def __str__(self) -> str:
        if self.unsat:
            return "false"
        if not self.paths:
            return "true"
        return " ∨ ".join(f"({p})" if len(self.paths) > 1 else str(p) for p in self.paths)


# canonical forms -------------------------------------------------------------


def _gcd_all(values: Iterable[int]) -> int:
    g = 0
    for v in values:
        g = math.gcd(g, abs(v))
    return g


def canonical_parts(atom: AtomicCondition) -> Optional[tuple[str, tuple, int]]:
    """Return ('<', coeffs, k) for Σc·x < k, ('=', coeffs, k) for Σc·x = k,
    ('true', ...) or ('false', ...) when the atom is constant."""
    diff = atom.lhs - atom.rhs
    coeffs = dict(diff.coeffs)
    c0 = diff.const
    op = atom.op
    if op in (">", ">="):
        coeffs = {s: -c for s, c in coeffs.items()}
        c0 = -c0
        op = "<" if op == ">" else "<="
    k = -c0
    if op == "<=":
        op, k = "<", k + 1
    if not coeffs:
        truth = (0 < k) if op == "<" else (k == 0)
        return ("true" if truth else "false", (), 0)
    g = _gcd_all(coeffs.values())
    if op == "<":
        coeffs = {s: c // g for s, c in coeffs.items()}
        k = -((-k) // g)  # ceil(k / g)
        return ("<", tuple(sorted(coeffs.items())), k)
    if k % g:
        return ("false", (), 0)
    coeffs = {s: c // g for s, c in coeffs.items()}
    k //= g
    first = sorted(coeffs.items())[0][1]
    if first < 0:
        coeffs = {s: -c for s, c in coeffs.items()}
        k = -k
    return ("=", tuple(sorted(coeffs.items())), k)


def make_atom(op: str, coeffs: tuple, k: int) -> AtomicCondition:
    return AtomicCondition(LinearTerm(coeffs, 0), op, LinearTerm((), k))


def canonical_atom(atom: AtomicCondition) -> Optional[AtomicCondition]:
    """Canonical single-atom form; None if trivially true. Raises nothing for
    false atoms; callers use :func:`canonical_parts` to detect them."""
    kind, coeffs, k = canonical_parts(atom)
    if kind in ("true", "false"):
        return None
    return make_atom(kind, coeffs, k)


def _negate(coeffs: tuple) -> tuple:
    return tuple((s, -c) for s, c in coeffs)


def _simplify_path(atoms: Iterable[AtomicCondition]) -> Optional[tuple[AtomicCondition, ...]]:
    """Canonical conjunction, or None when it is unsatisfiable over the integers."""
    lt: dict[tuple, int] = {}
    eq: dict[tuple, int] = {}
    for a in atoms:
        kind, coeffs, k = canonical_parts(a)
        if kind == "true":
            continue
        if kind == "false":
            return None
        if kind == "<":
            lt[coeffs] = min(k, lt.get(coeffs, k))
        else:
            if coeffs in eq and eq[coeffs] != k:
                return None
            eq[coeffs] = k

    # c·x < k1 and -c·x < k2 pin c·x into [1 - k2, k1 - 1]
    for coeffs in list(lt):
        neg = _negate(coeffs)
        if coeffs not in lt or neg not in lt:
            continue
        k1, k2 = lt[coeffs], lt[neg]
        lo, hi = 1 - k2, k1 - 1
        if lo > hi:
            return None
        if lo == hi:
            del lt[coeffs], lt[neg]
            if coeffs[0][1] > 0:
                key, val = coeffs, lo
            else:
                key, val = neg, -lo
            if key in eq and eq[key] != val:
                return None
            eq[key] = val

    for coeffs, v in eq.items():
        for sign, key in ((1, coeffs), (-1, _negate(coeffs))):
            if key in lt:
                if not sign * v < lt[key]:
                    return None
                del lt[key]

    out = [make_atom("<", c, k) for c, k in lt.items()] + [make_atom("=", c, k) for c, k in eq.items()]
    out.sort(key=lambda a: a.key)
    return tuple(out)


def simplify(s: ConstraintSet) -> ConstraintSet:
    """Canonical, logically equivalent (over the integers) form of ``s``.

    Each atom becomes Σc·x < k or Σc·x = k with coefficients sorted by symbol
    id and reduced by their gcd; duplicate and subsumed atoms are dropped,
    contradictory paths removed, and paths implied by a weaker path discarded.
    """
    if s.unsat:
        return replace(s, paths=())
    if not s.paths:
        return replace(s, paths=(), unsat=False)
    simplified = []
    for p in s.paths:
        atoms = _simplify_path(p.atoms)
        if atoms is None:
            continue
        if not atoms:
            return replace(s, paths=(), unsat=False)
        simplified.append(atoms)
    if not simplified:
        return replace(s, paths=(), unsat=True)
    keyed = {frozenset(a.key for a in atoms): atoms for atoms in simplified}
    keys = list(keyed)
    kept = [k for k in keys if not any(o < k for o in keys)]
    kept.sort(key=lambda k: sorted(k))
    paths = tuple(PathCondition(keyed[k], i) for i, k in enumerate(kept))
    return replace(s, paths=paths, unsat=False)


def canonicalize_atoms(s: ConstraintSet) -> ConstraintSet:
    """Per-atom canonical form plus duplicate removal, keeping block order."""
    paths = []
    seen = set()
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
            atoms.append(make_atom(kind, coeffs, k))
        if dead:
            continue
        uniq = tuple({a.key: a for a in atoms}.values())
        key = frozenset(a.key for a in uniq)
        if key in seen:
            continue
        seen.add(key)
        paths.append(PathCondition(uniq, len(paths)))
    return replace(s, paths=tuple(paths))
