"""Equational literals and clauses.

A literal is an unordered pair of terms with a sign; clauses are literal
multisets.  Clause identity for indexing uses a canonical key that renames
variables by first occurrence and sorts literals structurally, so duplicates
produced by different inference paths collapse.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .terms import App, Subst, Term, Var, apply_subst


class Literal:
    __slots__ = ("lhs", "rhs", "positive", "_hash", "_vars")

    def __init__(self, lhs: Term, rhs: Term, positive: bool):
        if lhs.sort != rhs.sort:
            raise ValueError("equation between sorts %s and %s" % (lhs.sort, rhs.sort))
        self.lhs = lhs
        self.rhs = rhs
        self.positive = positive
        # symmetric in lhs/rhs
        self._hash = hash(("lit", positive, hash(lhs) ^ hash(rhs)))
        self._vars = None

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Literal) or self.positive is not other.positive:
            return False
        return (self.lhs == other.lhs and self.rhs == other.rhs) or (
            self.lhs == other.rhs and self.rhs == other.lhs
        )

    def __hash__(self) -> int:
        return self._hash

    @property
    def ground(self) -> bool:
        return self.lhs.ground and self.rhs.ground

    @property
    def vars(self) -> frozenset:
        if self._vars is None:
            self._vars = self.lhs.vars | self.rhs.vars
        return self._vars

    @property
    def depth(self) -> int:
        return self.lhs.depth + self.rhs.depth

    def flipped(self) -> "Literal":
        return Literal(self.rhs, self.lhs, self.positive)

    def negated(self) -> "Literal":
        return Literal(self.lhs, self.rhs, not self.positive)

    def subst(self, sigma: Subst) -> "Literal":
        if self.ground or not sigma:
            return self
        if not any(v in sigma for v in self.vars):
            return self
        return Literal(apply_subst(self.lhs, sigma), apply_subst(self.rhs, sigma), self.positive)

    @property
    def trivial(self) -> bool:
        return self.lhs == self.rhs

    def __repr__(self) -> str:
        op = "=" if self.positive else "!="
        return "%r %s %r" % (self.lhs, op, self.rhs)


def _term_key(t: Term, names: dict) -> str:
    if isinstance(t, Var):
        if t not in names:
            names[t] = "?%d" % len(names)
        return names[t]
    if t.ground:
        # ground subterms are heavily shared; keep their key on the term
        k = t._tkey
        if k is None:
            if not t.args:
                k = t.sym.name
            else:
                k = "%s(%s)" % (t.sym.name, ",".join(_term_key(a, names) for a in t.args))
            t._tkey = k
        return k
    if not t.args:
        return t.sym.name
    return "%s(%s)" % (t.sym.name, ",".join(_term_key(a, names) for a in t.args))


@dataclass(frozen=True)
class InferenceRecord:
    """Provenance of one clause: which rule produced it from which parents.

    `data` carries rule-specific detail used by proof replay and the
    combination audit: the instantiated equation sides for paramodulation
    steps, whether the equation side was a bare variable, and the rewrite
    position.
    """

    rule: str
    parents: tuple[int, ...] = ()
    unifier: tuple = ()
    data: tuple = ()


INPUT = InferenceRecord("input")


class Clause:
    __slots__ = (
        "literals", "id", "age", "record", "is_input",
        "_key", "_hash", "_syms", "_mm", "_g", "_v", "_lc", "_fe", "_ie",
    )

    def __init__(
        self,
        literals: tuple[Literal, ...],
        cid: int = -1,
        record: InferenceRecord = INPUT,
        is_input: bool = False,
    ):
        self.literals = literals
        self.id = cid
        self.age = cid
        self.record = record
        self.is_input = is_input
        self._key = None
        self._hash = None
        self._syms = None
        self._mm = None
        self._g = None
        self._v = None
        self._lc = None
        self._fe = None
        self._ie = None

    @property
    def ground(self) -> bool:
        if self._g is None:
            self._g = all(l.ground for l in self.literals)
        return self._g

    @property
    def vars(self) -> frozenset:
        if self._v is None:
            out: frozenset = frozenset()
            for l in self.literals:
                out |= l.vars
            self._v = out
        return self._v

    @property
    def lit_counts(self) -> Counter:
        if self._lc is None:
            self._lc = Counter(self.literals)
        return self._lc

    @property
    def empty(self) -> bool:
        return not self.literals

    def key(self):
        """Canonical multiset key: literal sides sorted inside each literal,
        literals sorted, variables renamed by first occurrence in that order.
        Ground clauses get an exact key; variant detection for non-ground
        clauses is approximate (full variant checks go through subsumption)."""
        if self._key is None:
            names: dict = {}
            lits = []
            for lit in self.literals:
                a = _term_key(lit.lhs, names)
                b = _term_key(lit.rhs, names)
                if b < a:
                    a, b = b, a
                lits.append(("+" if lit.positive else "-", a, b))
            lits.sort()
            self._key = tuple(lits)
        return self._key

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def same_clause(self, other: "Clause") -> bool:
        return self.key() == other.key()

    @property
    def sym_counts(self) -> Counter:
        """Occurrences of each function symbol name; instantiation only adds
        symbols, so subsumption needs these to embed into the target's."""
        if self._syms is None:
            cnt: Counter = Counter()
            for lit in self.literals:
                _count_syms(lit.lhs, cnt)
                _count_syms(lit.rhs, cnt)
            self._syms = cnt
        return self._syms

    def weight(self, func_weight: int = 2, var_weight: int = 1) -> int:
        w = 0
        for lit in self.literals:
            for t in (lit.lhs, lit.rhs):
                w += _term_weight(t, func_weight, var_weight)
        return w

    def subst(self, sigma: Subst) -> tuple[Literal, ...]:
        return tuple(l.subst(sigma) for l in self.literals)

    def without(self, index: int) -> tuple[Literal, ...]:
        return self.literals[:index] + self.literals[index + 1 :]

    def __repr__(self) -> str:
        if not self.literals:
            return "<empty>"
        return " | ".join(map(repr, self.literals))


def _term_weight(t: Term, fw: int, vw: int) -> int:
    if isinstance(t, Var):
        return vw
    return fw + sum(_term_weight(a, fw, vw) for a in t.args)


def _count_syms(t: Term, cnt: Counter) -> None:
    if isinstance(t, Var):
        return
    cnt[t.sym.name] += 1
    for a in t.args:
        _count_syms(a, cnt)


def rename_clause_vars(literals: tuple[Literal, ...], taken: frozenset) -> tuple[Literal, ...]:
    """Rename variables in `literals` apart from `taken` (a set of Vars)."""
    clash = set()
    for l in literals:
        clash |= l.vars
    clash &= taken
    if not clash:
        return literals
    names = {v.name for v in taken}
    sigma: Subst = {}
    i = 0
    for v in sorted(clash, key=lambda v: v.name):
        while True:
            i += 1
            nn = "%s_%d" % (v.name.rstrip("0123456789_") or "X", i)
            if nn not in names:
                break
        names.add(nn)
        sigma[v] = Var(nn, v.sort)
    return tuple(l.subst(sigma) for l in literals)


def merge_duplicate_literals(literals: tuple[Literal, ...]) -> tuple[Literal, ...]:
    """Drop repeated literals, keeping first occurrences.  The merged clause
    is equivalent and strictly subsumes the original, so clauses are kept
    duplicate-free everywhere."""
    if len(set(literals)) == len(literals):
        return literals
    seen = set()
    out = []
    for lit in literals:
        if lit not in seen:
            seen.add(lit)
            out.append(lit)
    return tuple(out)


def canonical_literals(literals: tuple[Literal, ...]) -> tuple[Literal, ...]:
    """Merge duplicates, then rename variables to X1, X2, ... by first
    occurrence."""
    literals = merge_duplicate_literals(literals)
    sigma: Subst = {}
    for lit in literals:
        for t in (lit.lhs, lit.rhs):
            for v in _var_occurrences(t):
                if v not in sigma:
                    sigma[v] = Var("X%d" % (len(sigma) + 1), v.sort)
    if not sigma or all(v == w for v, w in sigma.items()):
        return literals
    return tuple(l.subst(sigma) for l in literals)


def _var_occurrences(t: Term):
    if isinstance(t, Var):
        yield t
    elif not t.ground:
        for a in t.args:
            yield from _var_occurrences(a)
