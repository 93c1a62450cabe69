"""Independent satisfiability oracles used to cross-check the prover.

None of these touch the saturation kernel.  Three layers:

* congruence closure over the subterm DAG (decides ground sets over free
  symbols; also the theory solver inside the ground DPLL);
* a small DPLL over ground clauses with congruence closure at the leaves,
  used to refute theory problems from finitely many axiom instances
  (sound for UNSAT, never claims SAT);
* bounded model search with structural interpretations (cyclic integers as
  disjoint cycles, records as tuples, arrays as function tables), sound for
  SAT; complete for the cyclic-offset theories.

`theory_oracle` combines the layers per theory and answers SAT, UNSAT or
UNKNOWN; every definite answer is sound.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Optional, Sequence

from .clauses import Clause, Literal
from .terms import App, Signature, Sort, Term, Var, apply_subst, is_const, subterms

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"


class CongruenceClosure:
    """Union-find over the subterm DAG with congruence propagation."""

    def __init__(self):
        self.parent: dict[Term, Term] = {}
        self.size: dict[Term, int] = {}
        self.users: dict[Term, list[App]] = {}
        self.lookup: dict[tuple, App] = {}

    def add(self, t: Term) -> None:
        if t in self.parent:
            return
        self.parent[t] = t
        self.size[t] = 1
        self.users[t] = []
        if isinstance(t, App) and t.args:
            for a in t.args:
                self.add(a)
                self.users[self.find(a)].append(t)
            self._congruent(t)

    def find(self, t: Term) -> Term:
        root = t
        while self.parent[root] is not root:
            root = self.parent[root]
        while self.parent[t] is not root:
            self.parent[t], t = root, self.parent[t]
        return root

    def _sig(self, t: App) -> tuple:
        return (t.sym.name, tuple(self.find(a) for a in t.args))

    def _congruent(self, t: App) -> None:
        sig = self._sig(t)
        other = self.lookup.get(sig)
        if other is None:
            self.lookup[sig] = t
        elif self.find(other) is not self.find(t):
            self.merge(other, t)

    def merge(self, a: Term, b: Term) -> None:
        work = [(a, b)]
        while work:
            x, y = work.pop()
            rx, ry = self.find(x), self.find(y)
            if rx is ry:
                continue
            if self.size[rx] < self.size[ry]:
                rx, ry = ry, rx
            self.parent[ry] = rx
            self.size[rx] += self.size[ry]
            moved = self.users.pop(ry, [])
            for p in moved:
                sig = self._sig(p)
                other = self.lookup.get(sig)
                if other is None:
                    self.lookup[sig] = p
                elif self.find(other) is not self.find(p):
                    work.append((other, p))
            self.users[rx].extend(moved)

    def equal(self, a: Term, b: Term) -> bool:
        self.add(a)
        self.add(b)
        return self.find(a) is self.find(b)

    def classes(self) -> dict[Term, list[Term]]:
        out: dict[Term, list[Term]] = {}
        for t in self.parent:
            out.setdefault(self.find(t), []).append(t)
        return out


def cc_decide(literals: Iterable[Literal]) -> str:
    """Ground satisfiability over free symbols: SAT or UNSAT."""
    cc = CongruenceClosure()
    lits = list(literals)
    for lit in lits:
        cc.add(lit.lhs)
        cc.add(lit.rhs)
    for lit in lits:
        if lit.positive:
            cc.merge(lit.lhs, lit.rhs)
    for lit in lits:
        if not lit.positive and cc.equal(lit.lhs, lit.rhs):
            return UNSAT
    return SAT


def ground_sat(clause_sets: Sequence[Sequence[Literal]]) -> bool:
    """Satisfiability of a set of ground clauses over free symbols: DPLL
    branching on clause literals, congruence closure as the leaf check."""
    clauses = sorted((list(c) for c in clause_sets), key=len)

    def rec(idx_order: list[int], assumed: list[Literal]) -> bool:
        cc = CongruenceClosure()
        for lit in assumed:
            cc.add(lit.lhs)
            cc.add(lit.rhs)
        for lit in assumed:
            if lit.positive:
                cc.merge(lit.lhs, lit.rhs)
        neg_pairs = set()
        for lit in assumed:
            if not lit.positive:
                if cc.equal(lit.lhs, lit.rhs):
                    return False
                neg_pairs.add(frozenset((cc.find(lit.lhs), cc.find(lit.rhs))))
        for pos, ci in enumerate(idx_order):
            open_lits = []
            satisfied = False
            for lit in clauses[ci]:
                eq = cc.equal(lit.lhs, lit.rhs)
                pair = frozenset((cc.find(lit.lhs), cc.find(lit.rhs)))
                if lit.positive:
                    if eq:
                        satisfied = True
                        break
                    if pair not in neg_pairs:
                        open_lits.append(lit)
                else:
                    if not eq:
                        if pair in neg_pairs:
                            satisfied = True
                            break
                        open_lits.append(lit)
            if satisfied:
                continue
            if not open_lits:
                return False
            rest = idx_order[:pos] + idx_order[pos + 1 :]
            return any(rec(rest, assumed + [lit]) for lit in open_lits)
        return True

    return rec(list(range(len(clauses))), [])


def instantiate(axioms: Iterable[Clause], universe: dict[Sort, list[Term]], cap: int = 50000):
    """Ground instances of axiom clauses over a finite term universe, or None
    when the instance count would exceed the cap."""
    out: list[list[Literal]] = []
    for ax in axioms:
        vs = sorted(ax.vars, key=lambda v: v.name)
        pools = []
        for v in vs:
            pool = universe.get(v.sort, [])
            if not pool:
                pools = None
                break
            pools.append(pool)
        if pools is None:
            continue
        count = 1
        for p in pools:
            count *= len(p)
        if len(out) + count > cap:
            return None
        for combo in itertools.product(*pools):
            sigma = dict(zip(vs, combo))
            out.append([lit.subst(sigma) for lit in ax.literals])
            if len(out) > cap:
                return None
    return out


def term_universe(literals: Iterable[Literal], sig: Signature) -> dict[Sort, list[Term]]:
    """All distinct ground subterms of the literals plus all constants."""
    seen: dict[Sort, dict[Term, None]] = {}
    def put(t: Term) -> None:
        seen.setdefault(t.sort, {}).setdefault(t, None)
    for lit in literals:
        for side in (lit.lhs, lit.rhs):
            for t in subterms(side):
                if t.ground:
                    put(t)
    for c in sig.constants():
        put(App(c))
    return {s: list(d) for s, d in seen.items()}


def refutes_by_instantiation(
    axioms: Sequence[Clause], literals: Sequence[Literal], sig: Signature, cap: int = 20000
) -> bool:
    """Sound UNSAT check: the input plus finitely many axiom instances is
    already propositionally unsatisfiable."""
    universe = term_universe(literals, sig)
    instances = instantiate(axioms, universe, cap)
    if instances is None:
        return False
    clause_sets = [[lit] for lit in literals] + instances
    return not ground_sat(clause_sets)


# -- structural model search -------------------------------------------------


def _constants_in(literals: Sequence[Literal]) -> list[App]:
    out: dict[App, None] = {}
    for lit in literals:
        for side in (lit.lhs, lit.rhs):
            for t in subterms(side):
                if is_const(t):
                    out.setdefault(t, None)
    return list(out)


def zk_decide(literals: Sequence[Literal], k: int, succ: str = "s", pred: str = "p") -> str:
    """Decide ground satisfiability modulo the cyclic offset theory with
    period k.  Every model is a disjoint union of k-cycles and the
    substructure generated by the constants fits in one cycle per constant,
    so searching assignments into m = #constants cycles is complete."""
    consts = _constants_in(literals)
    m = max(1, len(consts))
    dom = m * k

    def ev(t: Term, env: dict) -> int:
        if isinstance(t, App) and t.args:
            if t.sym.name == succ:
                v = ev(t.args[0], env)
                return (v // k) * k + (v + 1) % k
            if t.sym.name == pred:
                v = ev(t.args[0], env)
                return (v // k) * k + (v - 1) % k
            raise ValueError("unexpected symbol %s" % t.sym.name)
        return env[t]

    def holds(env: dict) -> bool:
        for lit in literals:
            eq = ev(lit.lhs, env) == ev(lit.rhs, env)
            if eq is not lit.positive:
                return False
        return True

    if not consts:
        return SAT if holds({}) else UNSAT
    first, rest = consts[0], consts[1:]
    for combo in itertools.product(range(dom), repeat=len(rest)):
        env = {first: 0}
        env.update(zip(rest, combo))
        if holds(env):
            return SAT
    return UNSAT


def _eval_struct(t: Term, env: dict, funcs: dict):
    if isinstance(t, App) and t.args:
        fn = funcs.get(t.sym.name)
        if fn is None:
            raise KeyError(t.sym.name)
        return fn(*[_eval_struct(a, env, funcs) for a in t.args])
    return env[t]


def _search_assignments(
    literals: Sequence[Literal], domains: dict[Sort, list], funcs: dict, budget: int
) -> Optional[bool]:
    """Try every assignment of the constants into their sort domains.  Returns
    True on a model, False if exhausted, None if over budget or a symbol has
    no interpretation."""
    consts = _constants_in(literals)
    pools = []
    for c in consts:
        dom = domains.get(c.sort)
        if not dom:
            return None
        pools.append(dom)
    total = 1
    for p in pools:
        total *= len(p)
        if total > budget:
            return None
    for combo in itertools.product(*pools):
        env = dict(zip(consts, combo))
        try:
            ok = all(
                (_eval_struct(l.lhs, env, funcs) == _eval_struct(l.rhs, env, funcs))
                is l.positive
                for l in literals
            )
        except KeyError:
            return None
        if ok:
            return True
    return False


def arrays_model_search(
    literals: Sequence[Literal], sig: Signature, bound: int = 3, budget: int = 400000
) -> Optional[bool]:
    """Look for a functional-array model: arrays are total maps from a finite
    index domain to an element domain, select/store act pointwise.  Such
    structures satisfy the array axioms and extensionality, so True is sound.
    """
    select = next(
        (s for s in sig.symbols.values() if s.theory in ("arrays", "arrays_ext") and s.arity == 2),
        None,
    )
    if select is None:
        return None
    array_s, index_s = select.arg_sorts
    elem_s = select.result

    def fn_select(a, i):
        return a[i]

    def fn_store(a, i, e):
        return a[:i] + (e,) + a[i + 1 :]

    funcs = {"select": fn_select, "store": fn_store}
    for ni in range(1, bound + 1):
        for ne in range(1, bound + 1):
            arrays = [tuple(t) for t in itertools.product(range(ne), repeat=ni)]
            domains = {array_s: arrays, index_s: list(range(ni))}
            if elem_s != index_s:
                domains[elem_s] = list(range(ne))
            elif ne != ni:
                continue
            res = _search_assignments(literals, domains, funcs, budget)
            if res:
                return True
    return False


def records_model_search(
    literals: Sequence[Literal],
    sig: Signature,
    fields: Sequence[tuple[str, str]],
    bound: int = 3,
    budget: int = 400000,
) -> Optional[bool]:
    """Records as tuples over finite field domains; rstore/rselect act
    componentwise, which satisfies the record axioms and extensionality."""
    rec_syms = [s for s in sig.symbols.values() if s.theory in ("records", "records_ext")]
    if not rec_syms:
        return None
    rec_sort = next(s.arg_sorts[0] for s in rec_syms if s.arity >= 1)
    field_sorts = []
    for fname, fsort in fields:
        field_sorts.append(fsort if isinstance(fsort, Sort) else sig.sorts[fsort])
    funcs = {}
    for idx, (fname, _) in enumerate(fields):
        funcs["rselect_%s" % fname] = (lambda i: lambda r: r[i])(idx)
        funcs["rstore_%s" % fname] = (lambda i: lambda r, v: r[:i] + (v,) + r[i + 1 :])(idx)
    for size in range(1, bound + 1):
        doms = {}
        for s in field_sorts:
            doms[s] = list(range(size))
        recs = [tuple(t) for t in itertools.product(*[doms[s] for s in field_sorts])]
        domains = dict(doms)
        domains[rec_sort] = recs
        res = _search_assignments(literals, domains, funcs, budget)
        if res:
            return True
    return False


def offsets_decide(literals: Sequence[Literal], succ: str = "s", pred: str = "p") -> str:
    """Decide ground satisfiability modulo acyclic integer offsets.

    Congruence closure plus successor-graph reasoning: saturate with
    functionality and injectivity of the successor on classes (both are
    consequences of the inverse axioms), then a cycle among classes refutes
    acyclicity while an acyclic graph unfolds into disjoint chains, i.e. a
    model."""
    cc = CongruenceClosure()
    terms_all: dict[Term, None] = {}
    for lit in literals:
        for side in (lit.lhs, lit.rhs):
            for t in subterms(side):
                terms_all.setdefault(t, None)
            cc.add(side)
    for lit in literals:
        if lit.positive:
            cc.merge(lit.lhs, lit.rhs)

    def succ_edges():
        # class -> set of successor classes, from s(u) upward and p(u) downward
        edges: dict[Term, set] = {}
        for t in terms_all:
            if isinstance(t, App) and t.args:
                if t.sym.name == succ:
                    edges.setdefault(cc.find(t.args[0]), set()).add(cc.find(t))
                elif t.sym.name == pred:
                    edges.setdefault(cc.find(t), set()).add(cc.find(t.args[0]))
        return edges

    changed = True
    while changed:
        changed = False
        edges = succ_edges()
        # functionality: one successor per class
        for src, dsts in edges.items():
            ds = list(dsts)
            for other in ds[1:]:
                if cc.find(other) is not cc.find(ds[0]):
                    cc.merge(other, ds[0])
                    changed = True
        if changed:
            continue
        # injectivity: one predecessor per class
        back: dict[Term, list[Term]] = {}
        for src, dsts in edges.items():
            for d in dsts:
                back.setdefault(d, []).append(src)
        for d, srcs in back.items():
            for other in srcs[1:]:
                if cc.find(other) is not cc.find(srcs[0]):
                    cc.merge(other, srcs[0])
                    changed = True
    for lit in literals:
        if not lit.positive and cc.equal(lit.lhs, lit.rhs):
            return UNSAT
    # cycle check on the successor graph
    edges = succ_edges()
    seen: dict[Term, int] = {}

    def dfs(node: Term) -> bool:
        seen[node] = 1
        for nxt in edges.get(node, ()):
            nxt = cc.find(nxt)
            state = seen.get(nxt)
            if state == 1:
                return False
            if state is None and not dfs(nxt):
                return False
        seen[node] = 2
        return True

    for node in list(edges):
        node = cc.find(node)
        if seen.get(node) is None:
            if not dfs(node):
                return UNSAT
    return SAT


def theory_oracle(
    spec,
    literals: Sequence[Literal],
    sig: Signature,
    axioms: Sequence[Clause] = (),
    bound: int = 3,
) -> str:
    """Best-effort decision for one theory; SAT/UNSAT answers are sound,
    UNKNOWN is possible for theories without a small-model property."""
    kind = spec.kind
    if kind == "euf":
        return cc_decide(literals)
    if kind in ("offsets",):
        return offsets_decide(literals)
    if kind in ("offsets_mod", "offsets_mod_dual"):
        return zk_decide(literals, spec.k)
    if kind in ("arrays", "arrays_ext"):
        if arrays_model_search(literals, sig, bound):
            return SAT
        if refutes_by_instantiation(axioms, literals, sig):
            return UNSAT
        return UNKNOWN
    if kind in ("records", "records_ext"):
        found = records_model_search(literals, sig, spec.fields, bound)
        if found:
            return SAT
        if refutes_by_instantiation(axioms, literals, sig):
            return UNSAT
        return UNKNOWN
    if kind in ("lists", "lists_shostak"):
        if refutes_by_instantiation(axioms, literals, sig):
            return UNSAT
        return UNKNOWN
    return UNKNOWN
