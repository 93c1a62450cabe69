"""Parametric generators for the six benchmark families.

Every family states an implication whose antecedent is a conjunction of
literals and whose consequent is a single equation, so the negation is a
plain literal set and no clausification machinery is needed.  An Instance
carries hypotheses and goal unflattened; downstream reduction and
flattening happen in `theories.build_problem`.

storecomm/swap/storeinv live in extensional arrays; ios combines arrays
with integer offsets over a single integer sort; queue adds records;
circularqueue swaps the offsets for the cyclic variant.  Valid instances
negate to unsatisfiable sets, invalid ones to satisfiable sets.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Sequence

from . import theories as th
from .clauses import Clause, Literal
from .terms import Signature, Term

VALID, INVALID = "valid", "invalid"

FAMILIES = (
    "storecomm",
    "storecomm_invalid",
    "swap",
    "swap_invalid",
    "storeinv",
    "storeinv_invalid",
    "ios",
    "queue",
    "circularqueue",
)

# families whose Pb(n) is a single formula: sampling collapses to one instance
SINGLETON = ("storeinv", "storeinv_invalid", "ios", "queue", "circularqueue")


class GenError(Exception):
    """Family parameters outside the defined range."""


@dataclass(frozen=True)
class Instance:
    """One benchmark problem: hypotheses => goal, plus enough metadata to
    rebuild it (family, size, selector tuple) and to solve it (theory specs
    and the signature holding its constants)."""

    family: str
    n: int
    k: int = 0
    selector: tuple = ()
    expected: str = VALID
    hypotheses: tuple = ()
    goal: Optional[Literal] = None
    theories: tuple = ()
    signature: Optional[Signature] = None
    label: str = ""

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        if self.k:
            return "%s_n%d_k%d" % (self.family, self.n, self.k)
        return "%s_n%d" % (self.family, self.n)

    def literals(self) -> list[Literal]:
        """The negated problem: hypotheses plus the negated goal."""
        out = list(self.hypotheses)
        out.append(Literal(self.goal.lhs, self.goal.rhs, False))
        return out


def _check_perm(p: Sequence[int], n: int) -> tuple:
    p = tuple(p)
    if sorted(p) != list(range(1, n + 1)):
        raise GenError("selector must be a permutation of 1..%d, got %r" % (n, p))
    return p


def _check_map(f: Sequence[int], n: int, what: str) -> tuple:
    f = tuple(f)
    if len(f) != n or any(not 1 <= v <= n for v in f):
        raise GenError("%s must map 1..%d into 1..%d, got %r" % (what, n, n, f))
    return f


def gen_storecomm(n: int, p: Optional[Sequence[int]] = None, variant: str = VALID) -> Instance:
    """Store order commutes on pairwise distinct indices.

    Hypotheses are all index disequalities i_l != i_m; the goal equates the
    store tower ordered by the permutation p with the identity-ordered tower
    (valid) or with a tower whose last store repeats position 1 (invalid).
    """
    if n < 2:
        raise GenError("storecomm needs n >= 2")
    p = _check_perm(p if p is not None else range(1, n + 1), n)
    spec = th.arrays(ext=True)
    sig = th.declare_theory(Signature(), spec)
    sig = sig.declare("a", (), th.ARRAY)
    for j in range(1, n + 1):
        sig = sig.declare("i%d" % j, (), th.INDEX)
        sig = sig.declare("e%d" % j, (), th.ELEM)
    idx = [sig.const("i%d" % j) for j in range(1, n + 1)]
    elm = [sig.const("e%d" % j) for j in range(1, n + 1)]

    def tower(perm: tuple) -> Term:
        t: Term = sig.const("a")
        for j in perm:
            t = sig.app("store", t, idx[j - 1], elm[j - 1])
        return t

    rhs = tuple(range(1, n + 1)) if variant == VALID else tuple(range(1, n)) + (1,)
    hyps = tuple(
        Literal(idx[l], idx[m], False) for l in range(n) for m in range(l + 1, n)
    )
    return Instance(
        family="storecomm" if variant == VALID else "storecomm_invalid",
        n=n,
        selector=p,
        expected=variant,
        hypotheses=hyps,
        goal=Literal(tower(p), tower(rhs), True),
        theories=(spec,),
        signature=sig,
    )


def gen_swap(
    n: int,
    c1: Sequence[int],
    c2: Sequence[int],
    p: Sequence[int],
    q: Sequence[int],
    variant: str = VALID,
) -> Instance:
    """Chains of element swaps commute in their argument pair.

    swap(x,i,j) abbreviates store(store(x,i,select(x,j)),j,select(x,i)); the
    subsets c1/c2 flip which of p(k),q(k) comes first at step k.  The invalid
    variant bumps q(1) to the next index (wrapping), so the two chains touch
    different positions.
    """
    if n < 1:
        raise GenError("swap needs n >= 1")
    if variant == INVALID and n < 2:
        raise GenError("swap invalid needs n >= 2 for the index bump to move")
    c1 = frozenset(c1)
    c2 = frozenset(c2)
    if any(not 1 <= j <= n for j in c1 | c2):
        raise GenError("subset members must lie in 1..%d" % n)
    p = _check_map(p, n, "p")
    q = _check_map(q, n, "q")
    spec = th.arrays(ext=True)
    sig = th.declare_theory(Signature(), spec)
    sig = sig.declare("a", (), th.ARRAY)
    for j in range(1, n + 1):
        sig = sig.declare("i%d" % j, (), th.INDEX)
    idx = [sig.const("i%d" % j) for j in range(1, n + 1)]

    def swap(t: Term, ti: Term, tj: Term) -> Term:
        return sig.app(
            "store", sig.app("store", t, ti, sig.app("select", t, tj)), tj, sig.app("select", t, ti)
        )

    def tower(c: frozenset, qq: tuple) -> Term:
        t: Term = sig.const("a")
        for k in range(1, n + 1):
            a_, b_ = idx[p[k - 1] - 1], idx[qq[k - 1] - 1]
            t = swap(t, a_, b_) if k in c else swap(t, b_, a_)
        return t

    qr = q if variant == VALID else ((q[0] % n) + 1,) + q[1:]
    return Instance(
        family="swap" if variant == VALID else "swap_invalid",
        n=n,
        selector=(tuple(sorted(c1)), tuple(sorted(c2)), p, q),
        expected=variant,
        hypotheses=(),
        goal=Literal(tower(c1, q), tower(c2, qr), True),
        theories=(spec,),
        signature=sig,
    )


def gen_storeinv(n: int, variant: str = VALID) -> Instance:
    """If exchanging the first n positions of a and b yields equal arrays,
    a and b were equal.  The invalid variant misplaces the outermost store
    index on the left side only."""
    if n < 0 or (variant == INVALID and n < 2):
        raise GenError("storeinv needs n >= 0 (invalid: n >= 2)")
    spec = th.arrays(ext=True)
    sig = th.declare_theory(Signature(), spec)
    sig = sig.declare("a", (), th.ARRAY).declare("b", (), th.ARRAY)
    for j in range(1, n + 1):
        sig = sig.declare("i%d" % j, (), th.INDEX)
    ta: Term = sig.const("a")
    tb: Term = sig.const("b")
    for j in range(1, n + (0 if variant == INVALID else 1)):
        ij = sig.const("i%d" % j)
        ta, tb = (
            sig.app("store", ta, ij, sig.app("select", tb, ij)),
            sig.app("store", tb, ij, sig.app("select", ta, ij)),
        )
    if variant == VALID:
        hyp = Literal(ta, tb, True)
    else:
        i1, iN = sig.const("i1"), sig.const("i%d" % n)
        hyp = Literal(
            sig.app("store", ta, i1, sig.app("select", tb, iN)),
            sig.app("store", tb, iN, sig.app("select", ta, iN)),
            True,
        )
    return Instance(
        family="storeinv" if variant == VALID else "storeinv_invalid",
        n=n,
        expected=variant,
        hypotheses=(hyp,),
        goal=Literal(sig.const("a"), sig.const("b"), True),
        theories=(spec,),
        signature=sig,
    )


def _pow(sig: Signature, f: str, t: Term, n: int) -> Term:
    for _ in range(n):
        t = sig.app(f, t)
    return t


def gen_ios(n: int) -> Instance:
    """Two loop unrollings writing a[i+k] = a[i]+k forwards and backwards
    agree only if a[i+n] = a[i]+n held initially.  Offsets i+k become s^k(i),
    subtraction becomes the predecessor, and indices share the integer sort
    with elements."""
    if n < 1:
        raise GenError("ios needs n >= 1")
    specs = (th.arrays(index=th.INT, elem=th.INT), th.offsets())
    sig = Signature()
    for spec in specs:
        sig = th.declare_theory(sig, spec)
    sig = sig.declare("a", (), th.ARRAY).declare("i", (), th.INT)
    a, i = sig.const("a"), sig.const("i")
    sel_i = sig.app("select", a, i)
    sel_n = sig.app("select", a, _pow(sig, "s", i, n))
    lhs: Term = a
    rhs: Term = a
    for k in range(1, n + 1):
        lhs = sig.app("store", lhs, _pow(sig, "s", i, k), _pow(sig, "s", sel_i, k))
        rhs = sig.app("store", rhs, _pow(sig, "s", i, n - k), _pow(sig, "p", sel_n, k))
    return Instance(
        family="ios",
        n=n,
        expected=VALID,
        hypotheses=(Literal(lhs, rhs, True),),
        goal=Literal(sel_n, _pow(sig, "s", sel_i, n), True),
        theories=specs,
        signature=sig,
    )


QUEUE_FIELDS = (("items", th.ARRAY), ("head", th.INT), ("tail", th.INT))


def _queue_sig(specs, n_queues: int, n_elems: int) -> Signature:
    sig = Signature()
    for spec in specs:
        sig = th.declare_theory(sig, spec)
    sig = sig.declare("q", (), th.REC)
    for j in range(n_queues):
        sig = sig.declare("q%d" % j, (), th.REC)
    for j in range(n_elems):
        sig = sig.declare("e%d" % j, (), th.ELEM)
    return sig


def _enqueue(sig: Signature, e: Term, x: Term) -> Term:
    items = sig.app("rselect_items", x)
    tail = sig.app("rselect_tail", x)
    return sig.app(
        "rstore_tail",
        sig.app("rstore_items", x, sig.app("store", items, tail, e)),
        sig.app("s", tail),
    )


def _dequeue(sig: Signature, x: Term) -> Term:
    return sig.app("rstore_head", x, sig.app("s", sig.app("rselect_head", x)))


def _reset(sig: Signature, x: Term) -> Term:
    return sig.app("rstore_head", x, sig.app("rselect_tail", x))


def _first(sig: Signature, x: Term) -> Term:
    return sig.app("select", sig.app("rselect_items", x), sig.app("rselect_head", x))


def _last(sig: Signature, x: Term) -> Term:
    return sig.app(
        "select", sig.app("rselect_items", x), sig.app("p", sig.app("rselect_tail", x))
    )


def gen_queue(n: int) -> Instance:
    """n enqueues with a dequeue after every third step leave e_m at the
    front, m being the number of dequeues performed."""
    if n < 1:
        raise GenError("queue needs n >= 1")
    specs = (th.records(QUEUE_FIELDS), th.arrays(index=th.INT), th.offsets())
    sig = _queue_sig(specs, n + 1, n)
    hyps = [Literal(sig.const("q0"), _reset(sig, sig.const("q")), True)]
    for i in range(n):
        step = _enqueue(sig, sig.const("e%d" % i), sig.const("q%d" % i))
        if (i + 1) % 3 == 0:
            step = _dequeue(sig, step)
        hyps.append(Literal(sig.const("q%d" % (i + 1)), step, True))
    m = n // 3
    return Instance(
        family="queue",
        n=n,
        expected=VALID,
        hypotheses=tuple(hyps),
        goal=Literal(_first(sig, sig.const("q%d" % n)), sig.const("e%d" % m), True),
        theories=specs,
        signature=sig,
    )


def gen_circularqueue(n: int, k: int) -> Instance:
    """n+1 enqueues into a circular queue of length k (with k dividing n)
    wrap around, so the first and last elements coincide."""
    if n < 1 or k < 1 or n % k != 0:
        raise GenError("circularqueue needs n > 0 with k dividing n")
    if k == 1 and n != 1:
        raise GenError("period 1 only admits the single-step instance")
    specs = (th.records(QUEUE_FIELDS), th.arrays(index=th.INT), th.offsets_mod(k))
    sig = _queue_sig(specs, n + 2, n + 1)
    hyps = [Literal(sig.const("q0"), _reset(sig, sig.const("q")), True)]
    for i in range(n + 1):
        hyps.append(
            Literal(
                sig.const("q%d" % (i + 1)),
                _enqueue(sig, sig.const("e%d" % i), sig.const("q%d" % i)),
                True,
            )
        )
    qn = sig.const("q%d" % (n + 1))
    return Instance(
        family="circularqueue",
        n=n,
        k=k,
        expected=VALID,
        hypotheses=tuple(hyps),
        goal=Literal(_first(sig, qn), _last(sig, qn), True),
        theories=specs,
        signature=sig,
    )


def lemma_store_comm(sig: Signature) -> Clause:
    """Commutativity of store on swapped positions, as an extra unit clause.
    Adding it forfeits the termination guarantee but preserves soundness."""
    select = next(
        s for s in sig.symbols.values() if s.name == "select" and s.arity == 2
    )
    from .terms import Var

    x = Var("x", select.arg_sorts[0])
    z = Var("z", select.arg_sorts[1])
    w = Var("w", select.arg_sorts[1])
    lhs = sig.app(
        "store", sig.app("store", x, z, sig.app("select", x, w)), w, sig.app("select", x, z)
    )
    rhs = sig.app(
        "store", sig.app("store", x, w, sig.app("select", x, z)), z, sig.app("select", x, w)
    )
    return Clause((Literal(lhs, rhs, True),))


# -- sampling ----------------------------------------------------------------


def _rng_for(family: str, n: int, seed: int) -> random.Random:
    return random.Random("%s:%d:%d" % (family, n, seed))


def sample(family: str, n: int, count: int = 9, seed: int = 0, k: int = 3) -> list[Instance]:
    """Deterministically sample `count` instances of a family at size n.

    Families with a single member per size collapse to one instance;
    selector-bearing families draw selectors uniformly."""
    if family not in FAMILIES:
        raise GenError("unknown family %r" % family)
    if count < 1:
        raise GenError("count must be positive")
    rng = _rng_for(family, n, seed)
    if family in SINGLETON:
        count = 1
    out: list[Instance] = []
    for j in range(count):
        if family.startswith("storecomm"):
            p = list(range(1, n + 1))
            rng.shuffle(p)
            inst = gen_storecomm(n, p, INVALID if family.endswith("invalid") else VALID)
        elif family.startswith("swap"):
            c1 = tuple(j2 for j2 in range(1, n + 1) if rng.random() < 0.5)
            c2 = tuple(j2 for j2 in range(1, n + 1) if rng.random() < 0.5)
            p = tuple(rng.randint(1, n) for _ in range(n))
            q = tuple(rng.randint(1, n) for _ in range(n))
            inst = gen_swap(n, c1, c2, p, q, INVALID if family.endswith("invalid") else VALID)
        elif family.startswith("storeinv"):
            inst = gen_storeinv(n, INVALID if family.endswith("invalid") else VALID)
        elif family == "ios":
            inst = gen_ios(n)
        elif family == "queue":
            inst = gen_queue(n)
        else:
            inst = gen_circularqueue(n, k)
        label = "%s/%d" % (inst.name, j)
        out.append(Instance(**{**inst.__dict__, "label": label}))
    return out


# -- random flat ground sets for the per-theory audits -----------------------


def random_ground_set(
    spec: th.TheorySpec, rng: random.Random, n_consts: int = 4, n_lits: int = 6
) -> tuple[list[Literal], Signature]:
    """A random flat ground literal set in one theory's fragment, for
    differential tests and clause-class audits.  Plain records get no record
    disequalities (their fragment is the reduced one); plain arrays likewise
    get no array disequalities."""
    sig = th.declare_theory(Signature(), spec)
    kind = spec.kind

    def consts(sort: str, prefix: str, count: int) -> list[Term]:
        nonlocal sig
        out = []
        for j in range(count):
            name = "%s%d" % (prefix, j)
            sig = sig.declare(name, (), sort)
            out.append(sig.const(name))
        return out

    lits: list[Literal] = []

    def eqda(a: Term, b: Term, p_eq: float = 0.5) -> Literal:
        return Literal(a, b, rng.random() < p_eq)

    if kind == "euf":
        cs = consts(th.ELEM, "c", n_consts)
        sig = sig.declare("f", (th.ELEM,), th.ELEM)
        sig = sig.declare("g", (th.ELEM, th.ELEM), th.ELEM)
        for _ in range(n_lits):
            shape = rng.randrange(3)
            if shape == 0:
                lits.append(eqda(rng.choice(cs), rng.choice(cs)))
            elif shape == 1:
                lits.append(Literal(sig.app("f", rng.choice(cs)), rng.choice(cs), True))
            else:
                lits.append(
                    Literal(sig.app("g", rng.choice(cs), rng.choice(cs)), rng.choice(cs), True)
                )
    elif kind in ("records", "records_ext"):
        rs = consts(th.REC, "r", max(2, n_consts // 2))
        field_consts = {
            fname: consts(fsort, "%s_v" % fname, 2) for fname, fsort in spec.fields
        }
        for _ in range(n_lits):
            fname, _fsort = rng.choice(spec.fields)
            vs = field_consts[fname]
            shape = rng.randrange(4 if kind == "records" else 5)
            if shape == 0:
                lits.append(Literal(sig.app("rselect_%s" % fname, rng.choice(rs)), rng.choice(vs), True))
            elif shape == 1:
                lits.append(
                    Literal(sig.app("rstore_%s" % fname, rng.choice(rs), rng.choice(vs)), rng.choice(rs), True)
                )
            elif shape == 2:
                lits.append(eqda(rng.choice(vs), rng.choice(vs)))
            elif shape == 3:
                lits.append(Literal(rng.choice(rs), rng.choice(rs), True))
            else:
                lits.append(Literal(rng.choice(rs), rng.choice(rs), False))
    elif kind in ("arrays", "arrays_ext"):
        idx_s, elem_s = th.array_sorts(spec)
        ars = consts(th.ARRAY, "a", max(2, n_consts // 2))
        ids = consts(idx_s, "i", n_consts)
        els = ids if elem_s == idx_s else consts(elem_s, "e", n_consts)
        for _ in range(n_lits):
            shape = rng.randrange(4 if kind == "arrays" else 5)
            if shape == 0:
                lits.append(Literal(sig.app("select", rng.choice(ars), rng.choice(ids)), rng.choice(els), True))
            elif shape == 1:
                lits.append(
                    Literal(
                        sig.app("store", rng.choice(ars), rng.choice(ids), rng.choice(els)),
                        rng.choice(ars),
                        True,
                    )
                )
            elif shape == 2:
                lits.append(eqda(rng.choice(ids), rng.choice(ids)))
            elif shape == 3:
                lits.append(eqda(rng.choice(els), rng.choice(els)))
            else:
                lits.append(eqda(rng.choice(ars), rng.choice(ars)))
    elif kind in ("lists", "lists_shostak"):
        cs = consts(th.LIST, "c", n_consts)
        pool = cs + ([sig.const("nil")] if kind == "lists" else [])
        for _ in range(n_lits):
            shape = rng.randrange(4)
            if shape == 0:
                lits.append(Literal(sig.app("car", rng.choice(cs)), rng.choice(pool), True))
            elif shape == 1:
                lits.append(Literal(sig.app("cdr", rng.choice(cs)), rng.choice(pool), True))
            elif shape == 2:
                lits.append(
                    Literal(sig.app("cons", rng.choice(pool), rng.choice(pool)), rng.choice(pool), True)
                )
            else:
                lits.append(eqda(rng.choice(pool), rng.choice(pool)))
    elif kind in ("offsets", "offsets_mod", "offsets_mod_dual"):
        cs = consts(th.INT, "c", n_consts)
        use_p = kind != "offsets_mod"
        for _ in range(n_lits):
            shape = rng.randrange(3 if use_p else 2)
            if shape == 0:
                lits.append(Literal(sig.app("s", rng.choice(cs)), rng.choice(cs), True))
            elif shape == 1 and use_p:
                lits.append(Literal(sig.app("p", rng.choice(cs)), rng.choice(cs), True))
            else:
                lits.append(eqda(rng.choice(cs), rng.choice(cs)))
    else:
        raise GenError("no random fragment for %r" % kind)
    return lits, sig
