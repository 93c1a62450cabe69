"""Given-clause saturation.

DISCOUNT-style loop: passive clauses wait in two lazy heaps (priority and
age); the given clause is forward simplified by processed unit equations,
checked for subsumption, then expanded against every processed clause.
Backward contraction re-queues simplified processed clauses as new clauses.

Every clause ever created is archived with its inference record, so a
refutation can be extracted as a DAG and replayed step by step against the
rule implementations.
"""

from __future__ import annotations

import heapq
import time
from collections import Counter as _Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .clauses import INPUT, Clause, InferenceRecord, Literal, merge_duplicate_literals
from .orderings import GOOD_LPO, STD_KBO, Ordering
from .terms import ORIGIN_SKOLEM, Var
from .rules import (
    VARHEAD,
    RewriteStep,
    apply_step,
    deletion_applies,
    equational_factoring,
    from_fingerprints,
    into_fingerprints,
    paramod_dir,
    reflection,
    simplify_indexed,
    simplify_once,
    subsumes,
    subsumes_le,
    unit_orientations,
)

UNSAT = "unsat"
SATURATED = "saturated"
TIMEOUT = "timeout"
CAPPED = "cap"


@dataclass(frozen=True)
class SearchPlan:
    """Clause selection policy.  `prefer` picks the priority bucket: clauses
    in the preferred bucket are selected before all others, ties go by weight
    (2 per function symbol, 1 per variable) then first-in-first-out.  Every
    `pick_oldest_every`-th selection takes the oldest passive clause instead,
    so heavy clauses cannot starve.

    With `goal_first`, clauses mentioning a skolem constant form a middle
    bucket between the preferred clauses and the rest.  Skolems enter only
    through reduction of goal disequations, so this steers search toward
    goal descendants; completeness is unaffected because the oldest-clause
    fallback still visits every passive clause eventually."""

    name: str
    scheme: str
    prefer: Optional[str] = None  # "input" | "ground" | None
    pick_oldest_every: int = 5
    goal_first: bool = False


PLAN_GOOD_LPO = SearchPlan("good-lpo", GOOD_LPO, prefer="input", goal_first=True)
PLAN_STD_KBO = SearchPlan("std-kbo", STD_KBO, prefer="ground")
PLANS = {p.name: p for p in (PLAN_GOOD_LPO, PLAN_STD_KBO)}


@dataclass(frozen=True)
class Limits:
    timeout: float = 60.0  # wall-clock seconds
    cap: int = 1_000_000  # retained clauses (processed + passive)


@dataclass
class Counters:
    initial: int = 0
    generated: int = 0
    processed: int = 0
    remaining: int = 0
    deleted: int = 0
    duplicates: int = 0
    fwd_subsumed: int = 0
    bwd_subsumed: int = 0
    simplified: int = 0
    unnecessary_pct: float = 0.0


@dataclass
class SaturationResult:
    status: str
    counters: Counters
    empty_clause: Optional[Clause]
    proof: Optional[list[Clause]]
    processed: list[Clause]
    archive: dict[int, Clause]
    elapsed: float
    plan: str

    @property
    def decided_unsat(self) -> bool:
        return self.status == UNSAT


def saturate(
    inputs: Iterable[Sequence[Literal]],
    ordering: Ordering,
    plan: SearchPlan = PLAN_GOOD_LPO,
    limits: Limits = Limits(),
    trace: Optional[Callable] = None,
) -> SaturationResult:
    """Saturate the input clause set under the expansion rules.

    `inputs` may mix Clause objects and plain literal sequences.  `trace`,
    when given, is called as trace(derived, parent_clauses) for every raw
    expansion conclusion before any filtering.
    """
    t0 = time.monotonic()
    counters = Counters()
    inputs = list(inputs)
    skolems: set[str] = set()
    if plan.goal_first:
        stack = [
            t
            for item in inputs
            for lit in (item.literals if isinstance(item, Clause) else item)
            for t in (lit.lhs, lit.rhs)
        ]
        while stack:
            t = stack.pop()
            if not isinstance(t, Var):
                if t.sym.origin == ORIGIN_SKOLEM:
                    skolems.add(t.sym.name)
                stack.extend(t.args)
    archive: dict[int, Clause] = {}
    seen_keys: set = set()
    processed: dict[int, Clause] = {}
    units: dict[int, Clause] = {}
    prio_heap: list[tuple] = []
    age_heap: list[tuple] = []
    alive: dict[int, Clause] = {}
    # fingerprint partner indexes: a clause pair can only interact when some
    # from-equation fingerprint is unifiable with some rewrite-position
    # fingerprint of the right sign; root-level aggregates serve wildcard
    # lookups
    idx_from: dict[tuple, list[int]] = {}
    idx_from_root: dict[str, list[int]] = {}
    idx_from_var: list[int] = []  # ids with a bare-variable equation side
    idx_pos: dict[tuple, list[int]] = {}
    idx_pos_root: dict[str, list[int]] = {}
    idx_neg: dict[tuple, list[int]] = {}
    idx_neg_root: dict[str, list[int]] = {}
    has_pos: list[int] = []  # ids with positive rewrite positions
    has_neg: list[int] = []
    # subsumption candidate indexes.  A ground subsumer shares every literal
    # with its target verbatim, so counting per-literal index hits finds it;
    # non-ground clauses are bucketed under one of their symbols, and every
    # symbol of a clause lists it in sym_occ for the backward direction.
    lit_idx: dict[Literal, list[int]] = {}
    ng_idx: dict[str, list[int]] = {}
    ng_nosym: list[int] = []
    sym_occ: dict[str, list[int]] = {}
    unit_idx: dict[str, list[tuple]] = {}  # rewrite root -> unit orientations
    next_id = 0

    def register(c: Clause) -> Clause:
        nonlocal next_id
        c.id = c.age = next_id
        archive[next_id] = c
        next_id += 1
        return c

    def mk(literals: tuple[Literal, ...], record: InferenceRecord, is_input: bool) -> Clause:
        return register(Clause(merge_duplicate_literals(tuple(literals)), -1, record, is_input))

    def bucket(c: Clause) -> int:
        if plan.prefer == "input":
            if c.is_input:
                return 0
            if skolems and not skolems.isdisjoint(c.sym_counts):
                return 1
            return 2
        if plan.prefer == "ground":
            return 0 if c.ground else 1
        return 0

    def push(c: Clause) -> None:
        alive[c.id] = c
        heapq.heappush(prio_heap, (bucket(c), c.weight(), c.age, c.id))
        heapq.heappush(age_heap, (c.age, c.id))

    def pop_live(heap: list) -> Optional[Clause]:
        while heap:
            cid = heapq.heappop(heap)[-1]
            if cid in alive:
                return alive.pop(cid)
        return None

    empty: Optional[Clause] = None
    status: Optional[str] = None

    for item in inputs:
        lits = item.literals if isinstance(item, Clause) else tuple(item)
        c = mk(lits, INPUT, True)
        counters.initial += 1
        if deletion_applies(c.literals):
            counters.deleted += 1
            continue
        k = c.key()
        if k in seen_keys:
            counters.duplicates += 1
            continue
        seen_keys.add(k)
        if c.empty:
            empty = c
            status = UNSAT
            break
        push(c)

    selections = 0
    while status is None:
        if time.monotonic() - t0 > limits.timeout:
            status = TIMEOUT
            break
        if len(processed) + len(alive) > limits.cap:
            status = CAPPED
            break
        selections += 1
        oldest = plan.pick_oldest_every and selections % plan.pick_oldest_every == 0
        given = pop_live(age_heap if oldest else prio_heap)
        if given is None:
            given = pop_live(prio_heap if oldest else age_heap)
        if given is None:
            status = SATURATED
            break

        # forward simplification by processed unit equations
        cur = given
        while True:
            res = simplify_indexed(cur.literals, unit_idx, units, ordering)
            if res is None:
                break
            new_lits, step = res
            counters.generated += 1
            counters.simplified += 1
            cur = mk(
                new_lits,
                InferenceRecord("simplify", (cur.id, step.rule_id), data=(step,)),
                False,
            )
        if cur is not given:
            if deletion_applies(cur.literals):
                counters.deleted += 1
                continue
            k = cur.key()
            if k in seen_keys:
                counters.duplicates += 1
                continue
            seen_keys.add(k)
        if cur.empty:
            empty = cur
            status = UNSAT
            break
        # forward subsumption.  hits[d] counts how many distinct literals of
        # cur occur verbatim in d's index entries, so a ground subsumer is a
        # candidate iff all its distinct literals hit
        hits: _Counter = _Counter()
        for l in cur.lit_counts:
            ids = lit_idx.get(l)
            if ids:
                hits.update(ids)
        ncur = len(cur.literals)
        fwd = False
        for did, h in hits.items():
            d = processed.get(did)
            if (
                d is not None
                and h == len(d.lit_counts)
                and len(d.literals) <= ncur
                and subsumes_le(d, cur)
            ):
                fwd = True
                break
        if not fwd:
            ng_cand: set[int] = set()
            for s in cur.sym_counts:
                ng_cand.update(ng_idx.get(s, ()))
            ng_cand.update(ng_nosym)
            for did in ng_cand:
                d = processed.get(did)
                if d is not None and len(d.literals) <= ncur and subsumes_le(d, cur):
                    fwd = True
                    break
        if fwd:
            counters.fwd_subsumed += 1
            continue

        # backward contraction; a ground cur can only subsume clauses that
        # contain all its distinct literals verbatim
        if cur.ground:
            ncur_distinct = len(cur.lit_counts)
            bwd_cand = sorted(did for did, h in hits.items() if h >= ncur_distinct)
        elif cur.sym_counts:
            s_star = min(
                cur.sym_counts, key=lambda s: (len(sym_occ.get(s, ())), s)
            )
            bwd_cand = sorted(set(sym_occ.get(s_star, ())))
        else:
            bwd_cand = sorted(processed)
        for did in bwd_cand:
            d = processed.get(did)
            if d is not None and subsumes(d, cur):
                del processed[d.id]
                units.pop(d.id, None)
                counters.bwd_subsumed += 1
        is_rule = (
            len(cur.literals) == 1
            and cur.literals[0].positive
            and not cur.literals[0].trivial
        )
        if is_rule:
            cur_orients = unit_orientations(cur, ordering)
            roots = {
                l.sym.name if not isinstance(l, Var) else VARHEAD
                for l, _, _ in cur_orients
            }
            for d in list(processed.values()):
                if VARHEAD not in roots and not any(
                    r in d.sym_counts for r in roots
                ):
                    continue
                res = simplify_once(d.literals, cur, ordering)
                if res is None:
                    continue
                del processed[d.id]
                units.pop(d.id, None)
                new_lits, step = res
                counters.generated += 1
                counters.simplified += 1
                nc = mk(
                    new_lits,
                    InferenceRecord("simplify", (d.id, cur.id), data=(step,)),
                    False,
                )
                if deletion_applies(nc.literals):
                    counters.deleted += 1
                    continue
                k = nc.key()
                if k in seen_keys:
                    counters.duplicates += 1
                    continue
                seen_keys.add(k)
                push(nc)

        processed[cur.id] = cur
        cid = cur.id
        for l in cur.lit_counts:
            lit_idx.setdefault(l, []).append(cid)
        for s in cur.sym_counts:
            sym_occ.setdefault(s, []).append(cid)
        if not cur.ground:
            if cur.sym_counts:
                s_min = min(
                    cur.sym_counts, key=lambda s: (len(ng_idx.get(s, ())), s)
                )
                ng_idx.setdefault(s_min, []).append(cid)
            else:
                ng_nosym.append(cid)
        if is_rule:
            units[cur.id] = cur
            for l, r, flipped in cur_orients:
                key = VARHEAD if isinstance(l, Var) else l.sym.name
                unit_idx.setdefault(key, []).append((cur, l, r, flipped))
        counters.processed += 1
        cur_from, cur_from_var = from_fingerprints(cur, ordering)
        cur_pos = into_fingerprints(cur, ordering, True)
        cur_neg = into_fingerprints(cur, ordering, False)
        for fp in cur_from:
            idx_from.setdefault(fp, []).append(cid)
        for r in {fp[0] for fp in cur_from}:
            idx_from_root.setdefault(r, []).append(cid)
        if cur_from_var:
            idx_from_var.append(cid)
        for fp in cur_pos:
            idx_pos.setdefault(fp, []).append(cid)
        for r in {fp[0] for fp in cur_pos}:
            idx_pos_root.setdefault(r, []).append(cid)
        for fp in cur_neg:
            idx_neg.setdefault(fp, []).append(cid)
        for r in {fp[0] for fp in cur_neg}:
            idx_neg_root.setdefault(r, []).append(cid)
        if cur_pos:
            has_pos.append(cid)
        if cur_neg:
            has_neg.append(cid)

        # expansion, against fingerprint-compatible processed clauses only;
        # four directions (cur as equation or as target, per target sign),
        # each with its own partner set
        sup_out: set = set()
        par_out: set = set()
        if cur_from_var:
            sup_out.update(has_pos)
            par_out.update(has_neg)
        for r, a in cur_from:
            if not a:
                sup_out.update(idx_pos_root.get(r, ()))
                par_out.update(idx_neg_root.get(r, ()))
            else:
                sup_out.update(idx_pos.get((r, a), ()))
                sup_out.update(idx_pos.get((r, VARHEAD), ()))
                par_out.update(idx_neg.get((r, a), ()))
                par_out.update(idx_neg.get((r, VARHEAD), ()))
        sup_in: set = set()
        par_in: set = set()
        for r, a in cur_pos:
            if not a:
                sup_in.update(idx_from_root.get(r, ()))
            else:
                sup_in.update(idx_from.get((r, a), ()))
                sup_in.update(idx_from.get((r, VARHEAD), ()))
        for r, a in cur_neg:
            if not a:
                par_in.update(idx_from_root.get(r, ()))
            else:
                par_in.update(idx_from.get((r, a), ()))
                par_in.update(idx_from.get((r, VARHEAD), ()))
        if cur_pos:
            sup_in.update(idx_from_var)
        if cur_neg:
            par_in.update(idx_from_var)
        sup_in.discard(cur.id)  # self-pairing covered by the outward sets
        par_in.discard(cur.id)

        derived = reflection(cur, ordering) + equational_factoring(cur, ordering)
        budget_hit = False
        for pairs, frm_is_cur, positive in (
            (sup_out, True, True),
            (par_out, True, False),
            (sup_in, False, True),
            (par_in, False, False),
        ):
            for did in sorted(pairs):
                d = processed.get(did)
                if d is None:
                    continue
                if frm_is_cur:
                    derived += paramod_dir(d, cur, ordering, positive)
                else:
                    derived += paramod_dir(cur, d, ordering, positive)
                if len(derived) > 4096 and time.monotonic() - t0 > limits.timeout:
                    budget_hit = True
                    break
            if budget_hit:
                break
        for dv in derived:
            counters.generated += 1
            if trace is not None:
                trace(dv, [archive[p] for p in dv.parents])
            if deletion_applies(dv.literals):
                counters.deleted += 1
                continue
            nc = Clause(dv.literals, -1, InferenceRecord(dv.rule, dv.parents, data=dv.info), False)
            k = nc.key()
            if k in seen_keys:
                counters.duplicates += 1
                continue
            register(nc)
            seen_keys.add(k)
            if nc.empty:
                empty = nc
                status = UNSAT
                break
            push(nc)

    counters.remaining = len(alive)
    proof = None
    if empty is not None:
        proof = extract_proof(empty, archive)
        in_proof = sum(1 for c in proof if c.record.rule != "input")
        if counters.generated:
            counters.unnecessary_pct = 100.0 * (counters.generated - in_proof) / counters.generated
    elif counters.generated:
        wasted = counters.deleted + counters.duplicates + counters.fwd_subsumed
        counters.unnecessary_pct = 100.0 * wasted / counters.generated
    return SaturationResult(
        status=status,
        counters=counters,
        empty_clause=empty,
        proof=proof,
        processed=list(processed.values()),
        archive=archive,
        elapsed=time.monotonic() - t0,
        plan=plan.name,
    )


def extract_proof(empty: Clause, archive: dict[int, Clause]) -> list[Clause]:
    """Ancestor closure of the empty clause, in id (hence topological) order."""
    seen: set[int] = set()
    stack = [empty.id]
    while stack:
        cid = stack.pop()
        if cid in seen:
            continue
        seen.add(cid)
        stack.extend(archive[cid].record.parents)
    return [archive[cid] for cid in sorted(seen)]


def replay_proof(
    proof: Sequence[Clause], ordering: Ordering, input_keys: set
) -> tuple[bool, str]:
    """Re-execute every step of an extracted refutation.

    Input leaves must match the original problem clauses; every derived
    clause must be reproducible from its recorded parents by the recorded
    rule.  Returns (ok, message)."""
    by_id = {c.id: c for c in proof}
    for c in proof:
        rec = c.record
        if rec.rule == "input":
            if c.key() not in input_keys:
                return False, "clause %d is not an input clause" % c.id
            continue
        parents = []
        for p in rec.parents:
            if p not in by_id:
                return False, "clause %d: parent %d missing from proof" % (c.id, p)
            parents.append(by_id[p])
        if rec.rule == "simplify":
            steps = [d for d in rec.data if isinstance(d, RewriteStep)]
            if len(parents) != 2 or len(steps) != 1:
                return False, "clause %d: malformed simplification record" % c.id
            lits = apply_step(parents[0].literals, parents[1], steps[0], ordering)
            if lits is None or Clause(lits).key() != c.key():
                return False, "clause %d: rewrite step does not replay" % c.id
        elif rec.rule in ("superposition", "paramodulation"):
            if len(parents) != 2:
                return False, "clause %d: binary rule with %d parents" % (c.id, len(parents))
            outs = expansions(parents[0], parents[1], ordering)
            if not any(dv.rule == rec.rule and Clause(dv.literals).key() == c.key() for dv in outs):
                return False, "clause %d: %s conclusion not reproducible" % (c.id, rec.rule)
        elif rec.rule == "reflection":
            outs = reflection(parents[0], ordering)
            if not any(Clause(dv.literals).key() == c.key() for dv in outs):
                return False, "clause %d: reflection conclusion not reproducible" % c.id
        elif rec.rule == "equational_factoring":
            outs = equational_factoring(parents[0], ordering)
            if not any(Clause(dv.literals).key() == c.key() for dv in outs):
                return False, "clause %d: factoring conclusion not reproducible" % c.id
        else:
            return False, "clause %d: unknown rule %r" % (c.id, rec.rule)
    if not proof or proof[-1].literals:
        return False, "proof does not end in the empty clause"
    return True, "ok"
