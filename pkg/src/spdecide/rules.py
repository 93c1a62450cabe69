"""Expansion and contraction rules of the superposition calculus.

Expansion rules return `Derived` conclusions; the saturation loop turns them
into clauses.  All ordering side conditions are checked after applying the
unifier; incomparable outcomes satisfy the negated conditions by design.

Contraction: strict subsumption (forward and backward), rewriting by unit
equations (demodulation restricted so the rewritten clause shrinks in the
clause ordering), and deletion of clauses containing a trivial equation.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Optional

from .clauses import Clause, Literal, canonical_literals, rename_clause_vars
from .orderings import EQ, GT, LT, NC, Ordering, multiset_ext
from .terms import App, Subst, Term, Var, apply_subst, match, positions, replace_at, unify


@dataclass(frozen=True)
class Derived:
    """One expansion conclusion: the literals plus enough detail to replay the
    step and to audit cross-theory traffic (instantiated equation sides, the
    symbol enclosing the rewrite position, whether the equation side was a
    bare variable)."""

    literals: tuple[Literal, ...]
    rule: str
    parents: tuple[int, ...]
    info: tuple = ()


def _enclosing_symbol(l: Term, path: tuple[int, ...]) -> Optional[str]:
    if not path:
        return None
    t = l
    for i in path[:-1]:
        t = t.args[i]
    return t.sym.name


def _oriented(lit: Literal) -> Iterator[tuple[Term, Term]]:
    yield lit.lhs, lit.rhs
    if lit.lhs != lit.rhs:
        yield lit.rhs, lit.lhs


def _max_mask(ordering: Ordering, clause: Clause) -> list[bool]:
    mm = clause._mm
    if mm is not None and mm[0] is ordering:
        return mm[1]
    mask = ordering.maximal_mask(clause.literals)
    clause._mm = (ordering, mask)
    return mask


def _directions(lit: Literal, ordering: Ordering) -> tuple:
    """Usable side orientations.  A strictly ordered literal only works in its
    oriented direction (stability keeps it ordered under any instance); the
    bool records that the instantiated side check is already settled."""
    pre = ordering.compare(lit.lhs, lit.rhs)
    if pre is GT:
        return ((lit.lhs, lit.rhs, True),)
    if pre is LT:
        return ((lit.rhs, lit.lhs, True),)
    if pre is EQ:
        return ()
    return ((lit.lhs, lit.rhs, False), (lit.rhs, lit.lhs, False))


def from_entries(clause: Clause, ordering: Ordering) -> tuple:
    """Usable equation orientations (j, u, t, settled_i) of a from premise:
    positive maximal literals only, since a literal strictly below another
    fails (ii) under every instance."""
    fe = clause._fe
    if fe is not None and fe[0] is ordering:
        return fe[1]
    mask = _max_mask(ordering, clause)
    out = []
    for j, lit in enumerate(clause.literals):
        if lit.positive and mask[j]:
            for u, t, settled in _directions(lit, ordering):
                out.append((j, u, t, settled))
    clause._fe = (ordering, tuple(out))
    return clause._fe[1]


def into_entries(clause: Clause, ordering: Ordering, positive: bool) -> tuple:
    """Rewrite targets (i, l, r, settled_iii, path, sub) inside maximal
    literals of the given sign; dominated literals fail (iv) under every
    instance, variable positions are never rewritten."""
    ie = clause._ie
    if ie is not None and ie[0] is ordering:
        return ie[1 if positive else 2]
    mask = _max_mask(ordering, clause)
    pos_out: list = []
    neg_out: list = []
    for i, lit in enumerate(clause.literals):
        if not mask[i]:
            continue
        out = pos_out if lit.positive else neg_out
        for l, r, settled in _directions(lit, ordering):
            for path, sub in positions(l):
                if not isinstance(sub, Var):
                    out.append((i, l, r, settled, path, sub))
    clause._ie = (ordering, tuple(pos_out), tuple(neg_out))
    return clause._ie[1 if positive else 2]


def _paramod(into: Clause, frm: Clause, ordering: Ordering, positive: bool, rule: str) -> list[Derived]:
    out: list[Derived] = []
    ies = into_entries(into, ordering, positive)
    if not ies:
        return out
    fes = from_entries(frm, ordering)
    if not fes:
        return out
    into_vars = into.vars
    frm_lits = frm.literals
    if into_vars and frm.vars & into_vars:
        frm_lits = rename_clause_vars(frm.literals, into_vars)
        mask = _max_mask(ordering, frm)
        fes = tuple(
            (j, u, t, settled)
            for j, flit in enumerate(frm_lits)
            if flit.positive and mask[j]
            for u, t, settled in _directions(flit, ordering)
        )
    # ground literals are totally ordered and duplicates are merged, so a
    # maximal literal of a ground premise is the unique strict maximum and
    # (ii) resp. (iv) cannot fail; for unit premises they are vacuous
    skip_ii = frm.ground or len(frm_lits) == 1
    skip_iv = into.ground or len(into.literals) == 1
    for j, u, t, settled_i in fes:
        u_app = isinstance(u, App)
        u_ground = u.ground
        for i, l, r, settled_iii, path, sub in ies:
            if u_app:
                if sub.sym.name != u.sym.name:
                    continue
                if u_ground and sub.ground:
                    if sub != u:
                        continue
                    sigma: Subst = {}
                else:
                    sigma = unify(sub, u)
                    if sigma is None:
                        continue
            else:
                sigma = unify(sub, u)
                if sigma is None:
                    continue
            # variables of the rewritten clause may only bind flat
            # terms; deeper bindings arise solely in axiom-axiom
            # interactions whose conclusions escape every
            # persistent clause class and breed without bound
            if any(
                v in into_vars and isinstance(b, App) and b.args
                for v, b in sigma.items()
            ):
                continue
            usig = apply_subst(u, sigma)
            tsig = apply_subst(t, sigma)
            if not settled_i and ordering.compare(usig, tsig) in (LT, EQ):  # (i)
                continue
            lsig = apply_subst(l, sigma)
            rsig = apply_subst(r, sigma)
            if not settled_iii and ordering.compare(lsig, rsig) in (LT, EQ):  # (iii)
                continue
            if not skip_ii:
                eq_s = Literal(usig, tsig, True)
                if not _max_wrt(eq_s, frm_lits, j, sigma, ordering, strict=True):  # (ii)
                    continue
            if not skip_iv:
                tgt_s = Literal(lsig, rsig, positive)
                if not _max_wrt(tgt_s, into.literals, i, sigma, ordering, strict=True):  # (iv)
                    continue
            new_lit = Literal(
                apply_subst(replace_at(l, path, t), sigma), rsig, positive
            )
            lits = (
                tuple(L.subst(sigma) for k, L in enumerate(into.literals) if k != i)
                + tuple(L.subst(sigma) for k, L in enumerate(frm_lits) if k != j)
                + (new_lit,)
            )
            out.append(
                Derived(
                    canonical_literals(lits),
                    rule,
                    (into.id, frm.id),
                    info=(
                        usig,
                        tsig,
                        _enclosing_symbol(lsig, path),
                        isinstance(u, Var),
                    ),
                )
            )
    return out


def _max_wrt(
    lit: Literal,
    others: tuple[Literal, ...],
    skip: int,
    sigma: Subst,
    ordering: Ordering,
    strict: bool,
) -> bool:
    """True iff lit is not <= (strict) resp. not < (not strict) any other
    instantiated literal."""
    bad = (LT, EQ) if strict else (LT,)
    for k, other in enumerate(others):
        if k == skip:
            continue
        if ordering.compare_literals(lit, other.subst(sigma)) in bad:
            return False
    return True


def paramod_dir(into: Clause, frm: Clause, ordering: Ordering, positive: bool) -> list[Derived]:
    """Superposition or paramodulation for one fixed direction and sign."""
    return _paramod(
        into, frm, ordering, positive, "superposition" if positive else "paramodulation"
    )


def superposition(into: Clause, frm: Clause, ordering: Ordering) -> list[Derived]:
    """Rewrite inside a positive literal of `into` with an equation of `frm`."""
    return _paramod(into, frm, ordering, True, "superposition")


def paramodulation(into: Clause, frm: Clause, ordering: Ordering) -> list[Derived]:
    """Rewrite inside a negative literal of `into` with an equation of `frm`."""
    return _paramod(into, frm, ordering, False, "paramodulation")


def reflection(clause: Clause, ordering: Ordering) -> list[Derived]:
    """Resolve a negative literal u' != u whose sides unify."""
    out = []
    for i, lit in enumerate(clause.literals):
        if lit.positive:
            continue
        sigma = unify(lit.lhs, lit.rhs)
        if sigma is None:
            continue
        eq_s = Literal(
            apply_subst(lit.lhs, sigma), apply_subst(lit.rhs, sigma), True
        )
        if not _max_wrt(eq_s, clause.literals, i, sigma, ordering, strict=False):
            continue
        lits = tuple(L.subst(sigma) for k, L in enumerate(clause.literals) if k != i)
        out.append(Derived(canonical_literals(lits), "reflection", (clause.id,)))
    return out


def equational_factoring(clause: Clause, ordering: Ordering) -> list[Derived]:
    """Factor two positive literals with unifiable larger sides."""
    out = []
    lits = clause.literals
    for i, lit1 in enumerate(lits):
        if not lit1.positive:
            continue
        for u, t in _oriented(lit1):
            if u.ground and t.ground and ordering.compare(u, t) in (LT, EQ):
                continue
            for j, lit2 in enumerate(lits):
                if j == i or not lit2.positive:
                    continue
                for u2, t2 in _oriented(lit2):
                    sigma = unify(u, u2)
                    if sigma is None:
                        continue
                    usig = apply_subst(u, sigma)
                    tsig = apply_subst(t, sigma)
                    if ordering.compare(usig, tsig) in (LT, EQ):  # (i)
                        continue
                    eq_s = Literal(usig, tsig, True)
                    if ordering.compare_literals(eq_s, lit2.subst(sigma)) is LT:
                        continue
                    ok = True
                    for k, other in enumerate(lits):
                        if k in (i, j):
                            continue
                        if ordering.compare_literals(eq_s, other.subst(sigma)) is LT:
                            ok = False
                            break
                    if not ok:
                        continue
                    rest = tuple(
                        L.subst(sigma) for k, L in enumerate(lits) if k not in (i, j)
                    )
                    new = rest + (
                        Literal(tsig, apply_subst(t2, sigma), False),
                        Literal(usig, apply_subst(t2, sigma), True),
                    )
                    out.append(
                        Derived(canonical_literals(new), "equational_factoring", (clause.id,))
                    )
    return out


def expansions(c: Clause, d: Clause, ordering: Ordering) -> list[Derived]:
    """All binary expansion conclusions between two (not necessarily distinct)
    clauses, both directions."""
    out = superposition(c, d, ordering) + paramodulation(c, d, ordering)
    if c is not d:
        out += superposition(d, c, ordering) + paramodulation(d, c, ordering)
    return out


VARHEAD = ""  # index key for variable-headed terms


def fingerprint(t: Term) -> tuple[str, str]:
    """(root symbol, first-argument root) of an application; VARHEAD marks a
    variable first argument, constants use the empty string.  Two terms can
    only unify when their fingerprints agree up to VARHEAD wildcards."""
    if not t.args:
        return (t.sym.name, "")
    a0 = t.args[0]
    return (t.sym.name, a0.sym.name if isinstance(a0, App) else VARHEAD)


def from_fingerprints(clause: Clause, ordering: Ordering) -> tuple[set, bool]:
    """Fingerprints of usable from-equation sides, plus whether any side is a
    bare variable (those unify with every rewrite position)."""
    fps = set()
    has_var = False
    for _, u, _, _ in from_entries(clause, ordering):
        if isinstance(u, App):
            fps.add(fingerprint(u))
        else:
            has_var = True
    return fps, has_var


def into_fingerprints(clause: Clause, ordering: Ordering, positive: bool) -> set:
    """Fingerprints of all rewritable positions of the given sign."""
    return {fingerprint(e[5]) for e in into_entries(clause, ordering, positive)}


# -- contraction -------------------------------------------------------------


def subsumes_le(c: Clause, d: Clause) -> bool:
    """True iff some instance of c is a sub-multiset of d (c at-least-subsumes
    d).  Variables of d act as constants."""
    cl, dl = c.literals, d.literals
    if len(cl) > len(dl):
        return False
    if c.ground and d.ground:
        have = d.lit_counts
        return all(have.get(l, 0) >= n for l, n in c.lit_counts.items())
    csy, dsy = c.sym_counts, d.sym_counts
    for s, n in csy.items():
        if dsy.get(s, 0) < n:
            return False
    # most-constrained-first: pair every c-literal with its head-compatible
    # d-literal orientations up front, then match scarcest rows first
    rows = []
    for i, lc in enumerate(cl):
        lhead = lc.lhs.sym.name if isinstance(lc.lhs, App) else None
        rhead = lc.rhs.sym.name if isinstance(lc.rhs, App) else None
        row = []
        for k, ld in enumerate(dl):
            if ld.positive is not lc.positive:
                continue
            for a, b in ((ld.lhs, ld.rhs), (ld.rhs, ld.lhs)):
                if lhead is not None and not (isinstance(a, App) and a.sym.name == lhead):
                    continue
                if rhead is not None and not (isinstance(b, App) and b.sym.name == rhead):
                    continue
                row.append((k, a, b))
                if ld.lhs == ld.rhs:
                    break
        if not row:
            return False
        rows.append((len(row), i, row))
    rows.sort(key=lambda e: (e[0], e[1]))
    used = [False] * len(dl)

    def rec(pos: int, sigma: Subst) -> bool:
        if pos == len(rows):
            return True
        _, i, row = rows[pos]
        lc = cl[i]
        for k, a, b in row:
            if used[k]:
                continue
            s2 = match(lc.lhs, a, sigma)
            if s2 is None:
                continue
            s3 = match(lc.rhs, b, s2)
            if s3 is None:
                continue
            used[k] = True
            if rec(pos + 1, s3):
                return True
            used[k] = False
        return False

    return rec(0, {})


def subsumes(d: Clause, c: Clause) -> bool:
    """Strict subsumption: d is redundant because of the strictly more general
    c.  Variants are not strict; the saturation loop keeps the older one."""
    return subsumes_le(c, d) and not subsumes_le(d, c)


def variant(c: Clause, d: Clause) -> bool:
    return len(c.literals) == len(d.literals) and subsumes_le(c, d) and subsumes_le(d, c)


@dataclass(frozen=True)
class RewriteStep:
    rule_id: int
    lit_index: int
    side: int  # 0 = lhs, 1 = rhs
    path: tuple[int, ...]
    flipped: bool  # rule used right-to-left


def simplify_once(
    literals: tuple[Literal, ...], rule: Clause, ordering: Ordering
) -> Optional[tuple[tuple[Literal, ...], RewriteStep]]:
    """One rewrite of `literals` by the unit equation `rule`, or None.

    Conditions: the matched instance l*sigma -> r*sigma is oriented
    (l*sigma > r*sigma) and the whole clause is greater than the rule
    instance, so rewriting always shrinks the clause ordering-wise.
    """
    (rl,) = rule.literals
    for flipped, (l, r) in enumerate(_oriented(rl)):
        if l.ground and r.ground and ordering.compare(l, r) is not GT:
            continue
        for li, lit in enumerate(literals):
            for side, tm in enumerate((lit.lhs, lit.rhs)):
                for path, sub in positions(tm):
                    if isinstance(sub, Var) or (isinstance(l, App) and sub.sym != l.sym):
                        continue
                    sigma = match(l, sub)
                    if sigma is None:
                        continue
                    rsig = apply_subst(r, sigma)
                    if ordering.compare(sub, rsig) is not GT:
                        continue
                    inst = Literal(sub, rsig, True)
                    if multiset_ext(
                        list(literals), [inst], ordering.compare_literals
                    ) is not GT:
                        continue
                    new_tm = replace_at(tm, path, rsig)
                    new_lit = (
                        Literal(new_tm, lit.rhs, lit.positive)
                        if side == 0
                        else Literal(lit.lhs, new_tm, lit.positive)
                    )
                    out = literals[:li] + (new_lit,) + literals[li + 1 :]
                    return out, RewriteStep(rule.id, li, side, path, bool(flipped))
    return None


def unit_orientations(rule: Clause, ordering: Ordering) -> tuple:
    """Usable rewrite orientations (l, r, flipped) of a unit equation; ground
    mis-oriented directions can never fire and are dropped up front."""
    (rl,) = rule.literals
    out = []
    for flipped, (l, r) in enumerate(_oriented(rl)):
        if l.ground and r.ground and ordering.compare(l, r) is not GT:
            continue
        out.append((l, r, bool(flipped)))
    return tuple(out)


def simplify_indexed(
    literals: tuple[Literal, ...],
    unit_idx: dict,
    live: dict,
    ordering: Ordering,
) -> Optional[tuple[tuple[Literal, ...], RewriteStep]]:
    """One rewrite of `literals` by a live indexed unit, or None.

    `unit_idx` maps a root symbol (VARHEAD for variable sides) to
    (rule, l, r, flipped) orientations; `live` holds the unit clauses still
    present.  Same conditions as `simplify_once`, position-major."""
    var_rules = unit_idx.get(VARHEAD, ())
    for li, lit in enumerate(literals):
        for side, tm in ((0, lit.lhs), (1, lit.rhs)):
            for path, sub in positions(tm):
                if isinstance(sub, Var):
                    continue
                for bucket in (unit_idx.get(sub.sym.name, ()), var_rules):
                    for rule, l, r, flipped in bucket:
                        if rule.id not in live:
                            continue
                        sigma = match(l, sub)
                        if sigma is None:
                            continue
                        rsig = apply_subst(r, sigma)
                        if ordering.compare(sub, rsig) is not GT:
                            continue
                        inst = Literal(sub, rsig, True)
                        if multiset_ext(
                            list(literals), [inst], ordering.compare_literals
                        ) is not GT:
                            continue
                        new_tm = replace_at(tm, path, rsig)
                        new_lit = (
                            Literal(new_tm, lit.rhs, lit.positive)
                            if side == 0
                            else Literal(lit.lhs, new_tm, lit.positive)
                        )
                        out = literals[:li] + (new_lit,) + literals[li + 1 :]
                        return out, RewriteStep(rule.id, li, side, path, flipped)
    return None


def apply_step(
    literals: tuple[Literal, ...], rule: Clause, step: RewriteStep, ordering: Ordering
) -> Optional[tuple[Literal, ...]]:
    """Replay a recorded rewrite step, revalidating its conditions."""
    (rl,) = rule.literals
    l, r = (rl.rhs, rl.lhs) if step.flipped else (rl.lhs, rl.rhs)
    lit = literals[step.lit_index]
    tm = lit.lhs if step.side == 0 else lit.rhs
    sub = tm
    for i in step.path:
        sub = sub.args[i]
    sigma = match(l, sub)
    if sigma is None:
        return None
    rsig = apply_subst(r, sigma)
    if ordering.compare(sub, rsig) is not GT:
        return None
    if multiset_ext(list(literals), [Literal(sub, rsig, True)], ordering.compare_literals) is not GT:
        return None
    new_tm = replace_at(tm, step.path, rsig)
    new_lit = (
        Literal(new_tm, lit.rhs, lit.positive)
        if step.side == 0
        else Literal(lit.lhs, new_tm, lit.positive)
    )
    return literals[: step.lit_index] + (new_lit,) + literals[step.lit_index + 1 :]


def deletion_applies(literals: tuple[Literal, ...]) -> bool:
    """Trivial equations and complementary literal pairs make a clause valid."""
    if any(l.positive and l.trivial for l in literals):
        return True
    pos = {l for l in literals if l.positive}
    return any(
        not l.positive and Literal(l.lhs, l.rhs, True) in pos for l in literals
    )


# -- clause shape predicates -------------------------------------------------


def is_variable_inactive(clause: Clause, ordering: Ordering) -> bool:
    """No maximal literal has the form t = x with x not in Var(t)."""
    mask = ordering.maximal_mask(clause.literals)
    for keep, lit in zip(mask, clause.literals):
        if not keep or not lit.positive:
            continue
        for a, b in ((lit.lhs, lit.rhs), (lit.rhs, lit.lhs)):
            if isinstance(b, Var) and b not in a.vars:
                return False
    return True


def is_cardinality_constraint(clause: Clause) -> bool:
    """Variable clause whose positive part, after unifying all negated pairs,
    is nonempty and free of trivial equations."""
    if not clause.literals:
        return False
    for lit in clause.literals:
        if not (isinstance(lit.lhs, Var) and isinstance(lit.rhs, Var)):
            return False
    sigma: Subst = {}
    for lit in clause.literals:
        if not lit.positive:
            s = unify(lit.lhs, lit.rhs, sigma)
            if s is None:
                return False
            sigma = s
    pos = [lit.subst(sigma) for lit in clause.literals if lit.positive]
    return bool(pos) and all(not l.trivial for l in pos)
