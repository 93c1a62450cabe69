"""Theory presentations, reduction pipelines, and clause-class audits.

Each supported theory ships its axioms, the reduction that eliminates
constructs the saturation engine cannot keep finite (record and array
extensionality, the predecessor symbol), and a recognizer for the clause
classes that the termination arguments allow in a saturated set.

`build_problem` assembles a combined decision problem: validate the
combination, reduce, flatten, instantiate the finite axiom schemas, and
build one suitably good ordering per branch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .clauses import Clause, Literal
from .orderings import GOOD_LPO, GoodnessReport, Ordering, build_ordering, check_goodness
from .rules import is_variable_inactive
from .terms import (
    ORIGIN_SKOLEM,
    App,
    Signature,
    Sort,
    Term,
    Var,
    flatten,
    is_const,
    subterms,
)

ARRAY, INDEX, ELEM, REC, LIST, INT = "ARRAY", "INDEX", "ELEM", "REC", "LIST", "INT"


class TheoryError(Exception):
    """Invalid theory parameters or an inadmissible combination."""


@dataclass(frozen=True)
class TheorySpec:
    """One theory instance.  `kind` picks the presentation; `k` is the period
    of the cyclic offset theories; `fields` lists (name, sort) pairs for
    records; `sorts` remaps the array index/elem sorts so arrays can range
    over the integer sort in combined problems.  `name` overrides the audit
    tag when two instances of the same kind must coexist."""

    kind: str
    k: int = 0
    fields: tuple = ()
    sorts: tuple = ()
    name: str = ""

    @property
    def tag(self) -> str:
        return self.name or self.kind


KINDS = (
    "euf",
    "records",
    "records_ext",
    "arrays",
    "arrays_ext",
    "lists",
    "lists_shostak",
    "offsets",
    "offsets_mod",
    "offsets_mod_dual",
)


def euf() -> TheorySpec:
    return TheorySpec("euf")


def records(fields: Sequence[tuple[str, str]], ext: bool = False) -> TheorySpec:
    if not fields:
        raise TheoryError("records need at least one field")
    names = [f for f, _ in fields]
    if len(set(names)) != len(names):
        raise TheoryError("duplicate record field names")
    return TheorySpec("records_ext" if ext else "records", fields=tuple(tuple(f) for f in fields))


def arrays(ext: bool = False, index: str = INDEX, elem: str = ELEM) -> TheorySpec:
    sorts = []
    if index != INDEX:
        sorts.append(("index", index))
    if elem != ELEM:
        sorts.append(("elem", elem))
    return TheorySpec("arrays_ext" if ext else "arrays", sorts=tuple(sorts))


def array_sorts(spec: TheorySpec) -> tuple[str, str]:
    """The (index, elem) sort names an array spec actually ranges over."""
    m = dict(spec.sorts)
    return m.get("index", INDEX), m.get("elem", ELEM)


def lists(shostak: bool = False) -> TheorySpec:
    return TheorySpec("lists_shostak" if shostak else "lists")


def offsets() -> TheorySpec:
    return TheorySpec("offsets")


def offsets_mod(k: int, dual: bool = False) -> TheorySpec:
    if k < 1 or (dual and k <= 1):
        raise TheoryError("cyclic offsets need period k > 1 (k = 1 only plain)")
    return TheorySpec("offsets_mod_dual" if dual else "offsets_mod", k=k)


def parse_theory(text: str) -> TheorySpec:
    """Inverse of spec_string: e.g. "arrays_ext", "offsets_mod(3)",
    "records(head:INT,items:ARRAY)", "arrays(index:INT,elem:INT)"."""
    text = text.strip()
    if "(" in text:
        head, _, rest = text.partition("(")
        rest = rest.rstrip(")")
        head = head.strip()
        if head in ("offsets_mod", "offsets_mod_dual"):
            return TheorySpec(head, k=int(rest))
        if head in ("records", "records_ext"):
            fields = []
            for part in rest.split(","):
                fname, _, fsort = part.partition(":")
                fields.append((fname.strip(), fsort.strip()))
            return TheorySpec(head, fields=tuple(fields))
        if head in ("arrays", "arrays_ext"):
            kw = {}
            for part in rest.split(","):
                role, _, srt = part.partition(":")
                kw[role.strip()] = srt.strip()
            return arrays(head == "arrays_ext", **kw)
        raise TheoryError("unknown parametric theory %r" % head)
    if text not in KINDS:
        raise TheoryError("unknown theory %r" % text)
    return TheorySpec(text)


def spec_string(spec: TheorySpec) -> str:
    if spec.kind in ("offsets_mod", "offsets_mod_dual"):
        return "%s(%d)" % (spec.kind, spec.k)
    if spec.kind in ("records", "records_ext"):
        return "%s(%s)" % (spec.kind, ",".join("%s:%s" % f for f in spec.fields))
    if spec.kind in ("arrays", "arrays_ext") and spec.sorts:
        return "%s(%s)" % (spec.kind, ",".join("%s:%s" % s for s in spec.sorts))
    return spec.kind


def declare_theory(sig: Signature, spec: TheorySpec) -> Signature:
    """Declare the theory's function symbols, tagged for the audits."""
    t = spec.tag
    if spec.kind in ("records", "records_ext"):
        for fname, fsort in spec.fields:
            sig = sig.declare("rselect_%s" % fname, (REC,), fsort, theory=t)
            sig = sig.declare("rstore_%s" % fname, (REC, fsort), REC, theory=t)
    elif spec.kind in ("arrays", "arrays_ext"):
        idx, elem = array_sorts(spec)
        sig = sig.declare("select", (ARRAY, idx), elem, theory=t)
        sig = sig.declare("store", (ARRAY, idx, elem), ARRAY, theory=t)
    elif spec.kind in ("lists", "lists_shostak"):
        sig = sig.declare("car", (LIST,), LIST, theory=t)
        sig = sig.declare("cdr", (LIST,), LIST, theory=t)
        sig = sig.declare("cons", (LIST, LIST), LIST, theory=t)
        if spec.kind == "lists":
            sig = sig.declare("nil", (), LIST)
    elif spec.kind in ("offsets", "offsets_mod", "offsets_mod_dual"):
        sig = sig.declare("s", (INT,), INT, theory=t)
        sig = sig.declare("p", (INT,), INT, theory=t)
    elif spec.kind != "euf":
        raise TheoryError("unknown theory kind %r" % spec.kind)
    return sig


def _iter_pow(sig: Signature, fname: str, t: Term, n: int) -> Term:
    for _ in range(n):
        t = sig.app(fname, t)
    return t


def axioms(spec: TheorySpec, sig: Signature, ac_n: Optional[int] = None) -> list[tuple[Literal, ...]]:
    """Axiom clauses for one theory, as literal tuples.

    For plain integer offsets the acyclicity schema must be cut down to
    finitely many instances; `ac_n` is that bound (the number of constants
    with a constrained successor, computed during reduction).
    """
    out: list[tuple[Literal, ...]] = []
    if spec.kind == "euf":
        return out
    if spec.kind in ("records", "records_ext"):
        rec = sig.sort(REC)
        x = Var("x", rec)
        for i, (fi, fsort) in enumerate(spec.fields):
            v = Var("v", sig.sort(fsort))
            out.append((Literal(sig.app("rselect_%s" % fi, sig.app("rstore_%s" % fi, x, v)), v, True),))
            for j, (fj, _) in enumerate(spec.fields):
                if i != j:
                    out.append(
                        (
                            Literal(
                                sig.app("rselect_%s" % fj, sig.app("rstore_%s" % fi, x, v)),
                                sig.app("rselect_%s" % fj, x),
                                True,
                            ),
                        )
                    )
        return out
    if spec.kind in ("arrays", "arrays_ext"):
        idx_name, elem_name = array_sorts(spec)
        x = Var("x", sig.sort(ARRAY))
        z = Var("z", sig.sort(idx_name))
        w = Var("w", sig.sort(idx_name))
        v = Var("v", sig.sort(elem_name))
        out.append((Literal(sig.app("select", sig.app("store", x, z, v), z), v, True),))
        out.append(
            (
                Literal(sig.app("select", sig.app("store", x, z, v), w), sig.app("select", x, w), True),
                Literal(z, w, True),
            )
        )
        return out
    if spec.kind in ("lists", "lists_shostak"):
        ls = sig.sort(LIST)
        x, y = Var("x", ls), Var("y", ls)
        out.append((Literal(sig.app("car", sig.app("cons", x, y)), x, True),))
        out.append((Literal(sig.app("cdr", sig.app("cons", x, y)), y, True),))
        if spec.kind == "lists_shostak":
            out.append((Literal(sig.app("cons", sig.app("car", y), sig.app("cdr", y)), y, True),))
        else:
            nil = sig.const("nil")
            out.append((Literal(sig.app("cons", x, y), nil, False),))
            out.append(
                (
                    Literal(sig.app("cons", sig.app("car", y), sig.app("cdr", y)), y, True),
                    Literal(y, nil, True),
                )
            )
            out.append((Literal(sig.app("car", nil), nil, True),))
            out.append((Literal(sig.app("cdr", nil), nil, True),))
        return out
    it = sig.sort(INT)
    x, y = Var("x", it), Var("y", it)
    inj = (Literal(sig.app("s", x), sig.app("s", y), False), Literal(x, y, True))
    if spec.kind == "offsets":
        n = ac_n if ac_n is not None else 0
        for i in range(1, n + 1):
            out.append((Literal(_iter_pow(sig, "s", x, i), x, False),))
        out.append(inj)
        return out
    if spec.kind == "offsets_mod":
        for i in range(1, spec.k):
            out.append((Literal(_iter_pow(sig, "s", x, i), x, False),))
        out.append((Literal(_iter_pow(sig, "s", x, spec.k), x, True),))
        out.append(inj)
        return out
    if spec.kind == "offsets_mod_dual":
        out.append((Literal(sig.app("s", sig.app("p", x)), x, True),))
        out.append((Literal(sig.app("p", sig.app("s", x)), x, True),))
        for i in range(1, spec.k):
            out.append((Literal(_iter_pow(sig, "s", x, i), x, False),))
        out.append((Literal(_iter_pow(sig, "s", x, spec.k), x, True),))
        for i in range(1, spec.k):
            out.append((Literal(_iter_pow(sig, "p", x, i), x, False),))
        out.append((Literal(_iter_pow(sig, "p", x, spec.k), x, True),))
        return out
    raise TheoryError("unknown theory kind %r" % spec.kind)


# -- reductions --------------------------------------------------------------


def r_reduce(literals: Sequence[Literal], spec: TheorySpec, sig: Signature) -> list[list[Literal]]:
    """Replace record disequalities by per-field disequalities, one branch per
    field choice (disjunctive normal form of the extensionality resolvents)."""
    rec = sig.sorts.get(REC)
    keep, diseqs = [], []
    for lit in literals:
        if not lit.positive and rec is not None and lit.lhs.sort == rec:
            diseqs.append(lit)
        else:
            keep.append(lit)
    branches = [keep]
    for lit in diseqs:
        branches = [
            b + [Literal(sig.app("rselect_%s" % fname, lit.lhs), sig.app("rselect_%s" % fname, lit.rhs), False)]
            for b in branches
            for fname, _ in spec.fields
        ]
    return branches


def a_reduce(
    literals: Sequence[Literal], sig: Signature, index_sort: str = INDEX
) -> tuple[list[Literal], Signature]:
    """Replace array disequalities l != r by select(l,sk) != select(r,sk)
    with one fresh index constant per distinct pair."""
    arr = sig.sorts.get(ARRAY)
    out: list[Literal] = []
    skolems: dict[frozenset, App] = {}
    for lit in literals:
        if lit.positive or arr is None or lit.lhs.sort != arr:
            out.append(lit)
            continue
        key = frozenset((lit.lhs, lit.rhs))
        sk = skolems.get(key)
        if sk is None:
            name = sig.fresh_name("_sk")
            sig = sig.declare(name, (), index_sort, origin=ORIGIN_SKOLEM)
            sk = sig.const(name)
            skolems[key] = sk
        out.append(Literal(sig.app("select", lit.lhs, sk), sig.app("select", lit.rhs, sk), False))
    return out, sig


def i_reduce(literals: Sequence[Literal], sig: Signature) -> tuple[list[Literal], int]:
    """Eliminate the predecessor symbol from a flat literal set and count the
    constants whose successor the set constrains.

    Flat equations p(c) = b become s(b) = c; the count drives how many
    acyclicity instances are needed."""
    out: list[Literal] = []
    for lit in literals:
        repl = None
        if lit.positive:
            for a, b in ((lit.lhs, lit.rhs), (lit.rhs, lit.lhs)):
                if isinstance(a, App) and a.sym.name == "p" and is_const(a.args[0]) and is_const(b):
                    repl = Literal(sig.app("s", b), a.args[0], True)
                    break
        out.append(repl if repl is not None else lit)
    cs = set()
    for lit in out:
        if lit.positive:
            for a, b in ((lit.lhs, lit.rhs), (lit.rhs, lit.lhs)):
                if isinstance(a, App) and a.sym.name == "s" and is_const(a.args[0]) and is_const(b):
                    cs.add(a.args[0])
    return out, len(cs)


# -- combined problem assembly ----------------------------------------------


@dataclass
class Branch:
    literals: list[Literal]
    axiom_clauses: list[tuple[Literal, ...]]
    signature: Signature
    ordering: Ordering
    ac_n: Optional[int] = None

    def clauses(self) -> list[tuple[Literal, ...]]:
        return self.axiom_clauses + [(lit,) for lit in self.literals]


@dataclass
class Problem:
    theories: tuple[TheorySpec, ...]
    branches: list[Branch]
    scheme: str
    goodness: Optional[GoodnessReport] = None


def _check_combination(theories: Sequence[TheorySpec], sig: Signature) -> None:
    tags = [t.tag for t in theories]
    if len(set(tags)) != len(tags):
        raise TheoryError("duplicate theory tags: give instances distinct names")
    protected = []
    if any(t.kind == "records_ext" for t in theories):
        protected.append(REC)
    if any(t.kind == "arrays_ext" for t in theories):
        protected.append(ARRAY)
    for sname in protected:
        srt = sig.sorts.get(sname)
        if srt is None:
            continue
        for sym in sig.symbols.values():
            if sym.theory is not None or sym.arity == 0:
                continue
            if srt in sym.arg_sorts[1:] or sym.result == srt:
                raise TheoryError(
                    "free symbol %s is not %s-safe" % (sym.name, sname.lower())
                )


def build_problem(
    theories: Sequence[TheorySpec],
    literals: Sequence[Literal],
    sig: Signature,
    scheme: str = GOOD_LPO,
    nontrivial: bool = False,
    ac_bound: Optional[int] = None,
    goodness_rng=None,
) -> Problem:
    """Reduce, flatten, and close a combined satisfiability problem.

    Returns one or more branches (record extensionality splits); the input is
    satisfiable modulo the combined theory iff some branch saturates without
    deriving the empty clause."""
    theories = tuple(theories)
    for spec in theories:
        sig = declare_theory(sig, spec)
    _check_combination(theories, sig)
    lits = list(literals)
    for lit in lits:
        if not lit.ground:
            raise TheoryError("input literals must be ground")

    if nontrivial:
        sort = None
        for lit in lits:
            if not lit.positive:
                sort = lit.lhs.sort.name
                break
        if sort is None:
            sort = next(iter(sig.sorts)) if sig.sorts else ELEM
        n1, n2 = sig.fresh_name("_sk"), None
        sig = sig.declare(n1, (), sort, origin=ORIGIN_SKOLEM)
        n2 = sig.fresh_name("_sk")
        sig = sig.declare(n2, (), sort, origin=ORIGIN_SKOLEM)
        lits.append(Literal(sig.const(n1), sig.const(n2), False))

    rec_spec = next((t for t in theories if t.kind == "records_ext"), None)
    branches_lits = r_reduce(lits, rec_spec, sig) if rec_spec else [lits]

    aext_spec = next((t for t in theories if t.kind == "arrays_ext"), None)
    has_offsets = any(t.kind in ("offsets", "offsets_mod") for t in theories)

    branches: list[Branch] = []
    for blits in branches_lits:
        bsig = sig
        if aext_spec is not None:
            blits, bsig = a_reduce(blits, bsig, array_sorts(aext_spec)[0])
        blits, bsig = flatten(blits, bsig)
        ac_n = None
        if has_offsets:
            blits, n = i_reduce(blits, bsig)
            ac_n = ac_bound if ac_bound is not None else n
        ax: list[tuple[Literal, ...]] = []
        for spec in theories:
            ax.extend(axioms(spec, bsig, ac_n=ac_n))
        clause_sets = ax + [(lit,) for lit in blits]
        ordering = build_ordering(scheme, bsig, clause_sets)
        branches.append(Branch(list(blits), ax, bsig, ordering, ac_n))

    prob = Problem(theories, branches, scheme)
    if branches:
        b0 = branches[0]
        tags = [t.kind for t in theories if t.kind != "euf"]
        prob.goodness = check_goodness(b0.ordering, b0.signature, tags, rng=goodness_rng)
    return prob


# -- clause-class audit ------------------------------------------------------


@dataclass
class AuditReport:
    tag: str
    total: int = 0
    counts: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _const(t: Term, sort: Optional[Sort] = None) -> bool:
    return is_const(t) and (sort is None or t.sort == sort)


def _const_pair(lit: Literal, sort: Optional[Sort] = None, sign: Optional[bool] = None) -> bool:
    if sign is not None and lit.positive is not sign:
        return False
    return _const(lit.lhs, sort) and _const(lit.rhs, sort)


def _app_of(t: Term, name: str) -> bool:
    return isinstance(t, App) and t.args and t.sym.name == name


def _pow_of(t: Term, name: str) -> tuple[int, Term]:
    """(j, u) such that t = name^j(u) and u is not name-rooted."""
    j = 0
    while isinstance(t, App) and t.args and t.sym.name == name:
        t = t.args[0]
        j += 1
    return j, t


def _flat_ground_unit(lits: tuple[Literal, ...]) -> bool:
    if len(lits) != 1 or not lits[0].ground:
        return False
    lit = lits[0]
    if not lit.positive:
        return _const(lit.lhs) and _const(lit.rhs)
    sides = sorted((lit.lhs, lit.rhs), key=lambda t: t.depth)
    if not _const(sides[0]):
        return False
    return sides[1].depth <= 1


def _audit_euf(lits, sig, spec, n):
    return "flat-unit" if _flat_ground_unit(lits) else None


def _audit_records(lits, sig, spec, n):
    rec = sig.sorts.get(REC)
    field_sorts = {sig.sorts[fs] for _, fs in spec.fields if fs in sig.sorts}
    if len(lits) != 1:
        return None
    lit = lits[0]
    if not lit.ground:
        return None
    l, r = lit.lhs, lit.rhs
    if _const(l) and _const(r):
        if lit.positive and l.sort == rec:
            return "iii.a"
        if l.sort in field_sorts:
            return "iii.b" if lit.positive else "iii.c"
        return None
    if not lit.positive:
        return None
    for a, b in ((l, r), (r, l)):
        for fname, _ in spec.fields:
            if (
                _app_of(a, "rstore_%s" % fname)
                and _const(a.args[0], rec)
                and _const(a.args[1])
                and _const(b, rec)
            ):
                return "iii.d"
            if _app_of(a, "rselect_%s" % fname) and _const(a.args[0], rec):
                if _const(b):
                    return "iii.e"
                if _app_of(b, "rselect_%s" % fname) and _const(b.args[0], rec):
                    return "iv"
    return None


def _index_tail(lits, sort, signs=None) -> bool:
    for lit in lits:
        if signs is not None and lit.positive not in signs:
            return False
        if not (_const(lit.lhs, sort) and _const(lit.rhs, sort)):
            return False
    return True


def _audit_arrays(lits, sig, spec, n):
    idx_name, elem_name = array_sorts(spec)
    arr, idx, elem = (sig.sorts.get(x) for x in (ARRAY, idx_name, elem_name))
    ground = all(l.ground for l in lits)
    if len(lits) == 1 and ground:
        lit = lits[0]
        l, r = lit.lhs, lit.rhs
        if _const(l) and _const(r):
            if l.sort == arr:
                return "iii.a" if lit.positive else None
            return "iii.b" if lit.positive else "iii.c"
        if lit.positive:
            for a, b in ((l, r), (r, l)):
                if (
                    _app_of(a, "store")
                    and all(map(_const, a.args))
                    and _const(b, arr)
                ):
                    return "iii.d"
                if _app_of(a, "select") and all(map(_const, a.args)) and _const(b, elem):
                    return "iii.e"
        return None
    if not ground:
        # iv.a: select(a,x) = select(a',x) | x = i_1 .. | j born j'
        for hi, head in enumerate(lits):
            rest = lits[:hi] + lits[hi + 1 :]
            if not head.positive:
                continue
            l, r = head.lhs, head.rhs
            if not (
                _app_of(l, "select")
                and _app_of(r, "select")
                and _const(l.args[0], arr)
                and _const(r.args[0], arr)
                and isinstance(l.args[1], Var)
                and l.args[1] == r.args[1]
            ):
                continue
            x = l.args[1]
            ok = True
            for lit in rest:
                if lit.positive and (
                    (lit.lhs == x and _const(lit.rhs, idx))
                    or (lit.rhs == x and _const(lit.lhs, idx))
                ):
                    continue
                if _const_pair(lit, idx):
                    continue
                ok = False
                break
            if ok:
                return "iv.a"
        return None
    for hi, head in enumerate(lits):
        rest = lits[:hi] + lits[hi + 1 :]
        if not _index_tail(rest, idx):
            continue
        l, r = head.lhs, head.rhs
        if head.positive:
            for a, b in ((l, r), (r, l)):
                if _app_of(a, "select") and all(map(_const, a.args)) and _const(b, elem):
                    return "iv.b"
                if (
                    _app_of(a, "store")
                    and all(map(_const, a.args))
                    and _const(b, arr)
                ):
                    return "iv.g"
            if _const(l, arr) and _const(r, arr):
                return "iv.g"
            if _const(l, elem) and _const(r, elem):
                return "iv.c"
            if _const(l, idx) and _const(r, idx):
                return "iv.e"
        else:
            if _const(l, elem) and _const(r, elem):
                return "iv.d"
            if _const(l, idx) and _const(r, idx):
                return "iv.f"
    return None


def _audit_lists(lits, sig, spec, n):
    ls = sig.sorts.get(LIST)
    if not all(l.ground for l in lits):
        return None
    if spec.kind == "lists_shostak" and len(lits) != 1:
        return None

    def carcdr(t, name):
        return _app_of(t, name) and _const(t.args[0], ls)

    def head_class(lit):
        if not lit.positive:
            return None
        for a, b in ((lit.lhs, lit.rhs), (lit.rhs, lit.lhs)):
            if _app_of(a, "cons") and _const(b, ls):
                u, v = a.args
                if _const(u) and carcdr(v, "cdr"):
                    return "iv.a"
                if carcdr(u, "car") and _const(v):
                    return "iv.b"
                if carcdr(u, "car") and carcdr(v, "cdr"):
                    return "iv.c"
                if _const(u) and _const(v):
                    return "iv.d"
            if carcdr(a, "car") and carcdr(b, "car"):
                return "iv.e"
            if carcdr(a, "cdr") and carcdr(b, "cdr"):
                return "iv.f"
            if carcdr(a, "car") and _const(b, ls):
                return "iv.g"
            if carcdr(a, "cdr") and _const(b, ls):
                return "iv.h"
        return None

    if all(_const_pair(l, ls) for l in lits):
        if len(lits) == 1:
            return "iii.a" if lits[0].positive else "iii.b"
        return "iv.i"
    for hi, head in enumerate(lits):
        rest = lits[:hi] + lits[hi + 1 :]
        if not all(_const_pair(l, ls) for l in rest):
            continue
        cls = head_class(head)
        if cls is None:
            continue
        if len(lits) == 1:
            unit_map = {"iv.g": "iii.c", "iv.h": "iii.d", "iv.d": "iii.e"}
            return unit_map.get(cls, cls)
        return cls
    return None


def _audit_offsets(lits, sig, spec, n):
    it = sig.sorts.get(INT)
    nb = (n if n is not None else 0) if spec.kind == "offsets" else spec.k - 1
    if not all(l.ground for l in lits):
        # iv.a: s(x) != d | x = c | negative constant tail
        for hi, head in enumerate(lits):
            if head.positive:
                continue
            rest = lits[:hi] + lits[hi + 1 :]
            for a, b in ((head.lhs, head.rhs), (head.rhs, head.lhs)):
                if not (_app_of(a, "s") and isinstance(a.args[0], Var) and _const(b, it)):
                    continue
                x = a.args[0]
                pos = [l for l in rest if l.positive]
                neg = [l for l in rest if not l.positive]
                if (
                    len(pos) == 1
                    and (
                        (pos[0].lhs == x and _const(pos[0].rhs, it))
                        or (pos[0].rhs == x and _const(pos[0].lhs, it))
                    )
                    and _index_tail(neg, it, signs={False})
                ):
                    return "iv.a"
        return None
    if _index_tail(lits, it, signs={False}):
        return "iii.b" if len(lits) == 1 else "iv.c"
    for hi, head in enumerate(lits):
        rest = lits[:hi] + lits[hi + 1 :]
        if not _index_tail(rest, it, signs={False}):
            continue
        l, r = head.lhs, head.rhs
        if head.positive and _const(l, it) and _const(r, it):
            return "iii.a" if len(lits) == 1 else "iv.b"
        for a, b in ((l, r), (r, l)):
            j, u = _pow_of(a, "s")
            if j == 0 or not (_const(u, it) and _const(b, it)):
                continue
            if head.positive:
                if j == 1:
                    return "iii.c" if len(lits) == 1 else "iv.d"
                if spec.kind == "offsets_mod" and 2 <= j <= nb and len(lits) == 1:
                    return "v"
            elif 1 <= j <= nb - 1:
                return "iv.e"
    return None


def _audit_offsets_dual(lits, sig, spec, n):
    if len(lits) != 1:
        return None

    def side_ok(t):
        for fname in ("s", "p"):
            j, u = _pow_of(t, fname)
            if j <= spec.k - 1 and (is_const(u) or isinstance(u, Var)):
                return True
        return False

    lit = lits[0]
    if side_ok(lit.lhs) and side_ok(lit.rhs):
        return "unit-depth-bounded"
    return None


_AUDITORS = {
    "euf": _audit_euf,
    "records": _audit_records,
    "records_ext": _audit_records,
    "arrays": _audit_arrays,
    "arrays_ext": _audit_arrays,
    "lists": _audit_lists,
    "lists_shostak": _audit_lists,
    "offsets": _audit_offsets,
    "offsets_mod": _audit_offsets,
    "offsets_mod_dual": _audit_offsets_dual,
}


def clause_class_audit(
    spec: TheorySpec,
    clauses: Iterable,
    sig: Signature,
    ac_n: Optional[int] = None,
) -> AuditReport:
    """Check every clause against the classes the termination lemma for this
    theory allows in a saturated set.  Unclassifiable clauses are reported as
    violations; the report never raises."""
    report = AuditReport(tag=spec.tag)
    ax_keys = {Clause(a).key() for a in axioms(spec, declare_theory(sig, spec), ac_n=ac_n)}
    auditor = _AUDITORS[spec.kind]
    for c in clauses:
        lits = c.literals if isinstance(c, Clause) else tuple(c)
        report.total += 1
        if not lits:
            cls = "i"
        elif Clause(lits).key() in ax_keys:
            cls = "ii"
        else:
            cls = auditor(lits, sig, spec, ac_n)
        if cls is None:
            report.violations.append(lits)
        else:
            report.counts[cls] = report.counts.get(cls, 0) + 1
    return report


class CombinationAudit:
    """Trace hook recording cross-theory expansion steps.

    A step is cross-theory when the parents' theory signatures are disjoint
    and nonempty.  The combination argument allows only paramodulations from
    constants into constants there; anything else is a violation."""

    def __init__(self, sig: Signature):
        self.sig = sig
        self.events: list[tuple] = []
        self.violations: list[tuple] = []

    def _tags(self, clause: Clause) -> frozenset:
        tags = set()
        for lit in clause.literals:
            for side in (lit.lhs, lit.rhs):
                for t in subterms(side):
                    if isinstance(t, App) and t.args and t.sym.theory:
                        tags.add(t.sym.theory)
        return frozenset(tags)

    def __call__(self, derived, parents) -> None:
        if derived.rule not in ("superposition", "paramodulation") or len(parents) != 2:
            return
        t1, t2 = self._tags(parents[0]), self._tags(parents[1])
        if not t1 or not t2 or (t1 & t2):
            return
        u_sigma = derived.info[0] if derived.info else None
        from_var = bool(derived.info[3]) if len(derived.info) > 3 else False
        ok = (not from_var) and u_sigma is not None and is_const(u_sigma)
        self.events.append((derived.rule, t1, t2, u_sigma, from_var, ok))
        if not ok:
            self.violations.append((derived.rule, t1, t2, u_sigma, from_var))

    @property
    def ok(self) -> bool:
        return not self.violations


def persistent_variable_inactive(clauses: Iterable[Clause], ordering: Ordering) -> list[Clause]:
    """Clauses violating variable-inactivity, for the combination check."""
    return [c for c in clauses if not is_variable_inactive(c, ordering)]
