"""Simplification orderings: LPO and KBO, their lifting to literals and
clauses, the two precedence schemes, and ordering/theory fitness checks.

Both orderings are total on ground terms for a total precedence.  Literal
comparison encodes l = r as the multiset {l, r} and l != r as {l, l, r, r};
clauses compare by the multiset extension of the literal ordering.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .clauses import Clause, Literal
from .terms import App, ORIGIN_INPUT, Signature, Sort, Symbol, Term, Var


class Cmp(enum.Enum):
    GT = ">"
    LT = "<"
    EQ = "="
    NC = "?"  # incomparable

    def flip(self) -> "Cmp":
        if self is Cmp.GT:
            return Cmp.LT
        if self is Cmp.LT:
            return Cmp.GT
        return self


GT, LT, EQ, NC = Cmp.GT, Cmp.LT, Cmp.EQ, Cmp.NC


class Ordering:
    """Base: a term ordering over a fixed precedence (symbol name -> rank,
    larger rank means greater).  Subclasses implement `gt`."""

    kind = "?"

    def __init__(self, precedence: dict[str, int]):
        self.prec = precedence
        self._cache: dict[tuple[Term, Term], Cmp] = {}
        self._lcache: dict[tuple[Literal, Literal], Cmp] = {}

    def gt(self, s: Term, t: Term) -> bool:
        raise NotImplementedError

    def compare(self, s: Term, t: Term) -> Cmp:
        if s == t:
            return EQ
        key = (s, t)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if self.gt(s, t):
            out = GT
        elif self.gt(t, s):
            out = LT
        else:
            out = NC
        self._cache[key] = out
        self._cache[(t, s)] = out.flip()
        return out

    # -- literals and clauses ------------------------------------------------

    def compare_literals(self, a: Literal, b: Literal) -> Cmp:
        key = (a, b)
        hit = self._lcache.get(key)
        if hit is None:
            hit = multiset_ext(_lit_encoding(a), _lit_encoding(b), self.compare)
            self._lcache[key] = hit
            self._lcache[(b, a)] = hit.flip()
        return hit

    def compare_clauses(self, c: Clause, d: Clause) -> Cmp:
        return multiset_ext(list(c.literals), list(d.literals), self.compare_literals)

    def maximal_mask(self, literals: tuple[Literal, ...]) -> list[bool]:
        """mask[i] is False iff some other literal is strictly greater."""
        n = len(literals)
        mask = [True] * n
        for i in range(n):
            for j in range(n):
                if i != j and self.compare_literals(literals[j], literals[i]) is GT:
                    mask[i] = False
                    break
        return mask

    def precedence_list(self) -> list[str]:
        """Symbol names, greatest first."""
        return [n for n, _ in sorted(self.prec.items(), key=lambda kv: -kv[1])]


def _lit_encoding(lit: Literal) -> list[Term]:
    if lit.positive:
        return [lit.lhs, lit.rhs]
    return [lit.lhs, lit.lhs, lit.rhs, lit.rhs]


def multiset_ext(xs: list, ys: list, cmp: Callable) -> Cmp:
    """Multiset extension of an order given by `cmp`."""
    xs = list(xs)
    ys = list(ys)
    # cancel equal elements pairwise
    for x in list(xs):
        for i, y in enumerate(ys):
            if cmp(x, y) is EQ:
                xs.remove(x)
                del ys[i]
                break
    if not xs and not ys:
        return EQ
    if not ys:
        return GT
    if not xs:
        return LT
    if all(any(cmp(x, y) is GT for x in xs) for y in ys):
        return GT
    if all(any(cmp(y, x) is GT for y in ys) for x in xs):
        return LT
    return NC


class LPO(Ordering):
    """Lexicographic path ordering, all symbols with left-to-right status."""

    kind = "lpo"

    def __init__(self, precedence: dict[str, int]):
        super().__init__(precedence)
        self._gtc: dict[tuple[Term, Term], bool] = {}

    def gt(self, s: Term, t: Term) -> bool:
        if isinstance(s, Var):
            return False
        if isinstance(t, Var):
            return t in s.vars
        key = (s, t)
        r = self._gtc.get(key)
        if r is None:
            r = self._gt(s, t)
            self._gtc[key] = r
        return r

    def _gt(self, s: App, t: App) -> bool:
        for a in s.args:
            if a == t or self.gt(a, t):
                return True
        ps, pt = self.prec[s.sym.name], self.prec[t.sym.name]
        if ps > pt:
            return all(self.gt(s, b) for b in t.args)
        if ps == pt:
            for sa, ta in zip(s.args, t.args):
                if sa == ta:
                    continue
                return self.gt(sa, ta) and all(self.gt(s, b) for b in t.args)
        return False


class KBO(Ordering):
    """Knuth-Bendix ordering with per-symbol weights and variable weight 1."""

    kind = "kbo"

    def __init__(self, precedence: dict[str, int], weights: dict[str, int], var_weight: int = 1):
        super().__init__(precedence)
        self.weights = weights
        self.var_weight = var_weight
        self._wcache: dict[Term, int] = {}

    def weight(self, t: Term) -> int:
        if isinstance(t, Var):
            return self.var_weight
        w = self._wcache.get(t)
        if w is None:
            w = self.weights[t.sym.name] + sum(self.weight(a) for a in t.args)
            self._wcache[t] = w
        return w

    def gt(self, s: Term, t: Term) -> bool:
        if isinstance(s, Var):
            return False
        if isinstance(t, Var):
            return t in s.vars
        if not (s.ground and t.ground):
            sv = _var_counts(s)
            tv = _var_counts(t)
            for v, n in tv.items():
                if sv.get(v, 0) < n:
                    return False
        ws, wt = self.weight(s), self.weight(t)
        if ws != wt:
            return ws > wt
        ps, pt = self.prec[s.sym.name], self.prec[t.sym.name]
        if ps != pt:
            return ps > pt
        for sa, ta in zip(s.args, t.args):
            if sa != ta:
                return self.gt(sa, ta)
        return False


def _var_counts(t: Term) -> Counter:
    c: Counter = Counter()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            c[u] += 1
        elif not u.ground:
            stack.extend(u.args)
    return c


# -- precedence schemes ------------------------------------------------------

GOOD_LPO = "good-lpo"
STD_KBO = "std-kbo"
SCHEMES = (GOOD_LPO, STD_KBO)

# constant bands under good-lpo, highest first; unlisted sorts follow in
# declaration order
_SORT_BANDS = {"REC": 0, "ARRAY": 1, "ELEM": 2, "INDEX": 3}


def symbol_frequencies(clauses: Iterable) -> Counter:
    freq: Counter = Counter()
    for c in clauses:
        for lit in c.literals if isinstance(c, Clause) else c:
            for t in (lit.lhs, lit.rhs):
                _count_syms(t, freq)
    return freq


def _count_syms(t: Term, freq: Counter) -> None:
    if isinstance(t, App):
        freq[t.sym.name] += 1
        for a in t.args:
            _count_syms(a, freq)


def _sort_band(sort: Sort, sig: Signature) -> int:
    band = _SORT_BANDS.get(sort.name)
    if band is not None:
        return band
    return len(_SORT_BANDS) + list(sig.sorts).index(sort.name)


def build_ordering(scheme: str, sig: Signature, input_clauses: Iterable[Clause]) -> Ordering:
    """Build the ordering for one of the two schemes.

    std-kbo: KBO, weight(f) = max(arity(f), 1), precedence by arity first,
    input symbols above invented constants, then by inverse input frequency
    (rarer is greater), declaration order last.

    good-lpo: LPO whose precedence refines the std-kbo one so that constants
    are grouped by sort (records above arrays above elements above indices),
    invented constants below input ones inside each sort band.
    """
    if scheme not in SCHEMES:
        raise ValueError("unknown ordering scheme %r" % scheme)
    freq = symbol_frequencies(input_clauses)
    syms = list(sig.symbols.values())

    def kbo_key(s: Symbol):
        return (-s.arity, 0 if s.origin == ORIGIN_INPUT else 1, freq[s.name], s.index)

    if scheme == STD_KBO:
        order = sorted(syms, key=kbo_key)
        prec = {s.name: len(order) - i for i, s in enumerate(order)}
        weights = {s.name: max(s.arity, 1) for s in syms}
        return KBO(prec, weights)

    funcs = sorted((s for s in syms if s.arity > 0), key=kbo_key)
    consts = sorted(
        (s for s in syms if s.arity == 0),
        key=lambda s: (
            _sort_band(s.result, sig),
            0 if s.origin == ORIGIN_INPUT else 1,
            freq[s.name],
            s.index,
        ),
    )
    order = funcs + consts
    prec = {s.name: len(order) - i for i, s in enumerate(order)}
    return LPO(prec)


# -- ordering/theory fitness -------------------------------------------------


@dataclass
class GoodnessReport:
    scheme: str
    results: dict[str, bool] = field(default_factory=dict)
    violations: list[tuple] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.results.values())


def _theory_symbol(sig: Signature, tags: tuple[str, ...], arity: int) -> Optional[Symbol]:
    for s in sig.symbols.values():
        if s.theory in tags and s.arity == arity:
            return s
    return None


def check_goodness(
    ordering: Ordering,
    sig: Signature,
    tags: Iterable[str],
    rng=None,
    samples: int = 200,
) -> GoodnessReport:
    """Check the ordering conditions each theory needs for termination.

    Structural sufficient conditions are checked first; each condition is then
    spot-checked on random ground pairs when an rng is supplied.  Conditions:
    ground compounds above constants (records, lists, arrays, dual cyclic
    offsets), successor-rooted terms above constants (offsets), cons-rooted
    terms above nil (lists), and array constants above element constants above
    index constants (arrays).  When element and index collapse into one sort
    the last condition degenerates to arrays above that sort.
    """
    report = GoodnessReport(scheme="%s" % ordering.kind)
    consts = [App(s) for s in sig.constants()]
    funcs = sig.functions()

    def sample_pairs(cond: str, make_big) -> bool:
        if rng is None or not consts:
            return True
        ok = True
        for _ in range(samples):
            big = make_big()
            c = rng.choice(consts)
            if big is None:
                continue
            if ordering.compare(big, c) is not GT:
                report.violations.append((cond, big, c))
                ok = False
        return ok

    def random_compound() -> Optional[Term]:
        if not funcs or rng is None:
            return None
        for _ in range(20):
            f = rng.choice(funcs)
            t = _random_app(f, sig, rng, depth=rng.randrange(3))
            if t is not None:
                return t
        return None

    for tag in tags:
        ok = True
        if tag in ("records", "records_ext", "lists", "lists_shostak", "arrays", "arrays_ext", "offsets_mod_dual"):
            ok = _compound_over_const(ordering, sig, report) and ok
            ok = sample_pairs("compound>const", random_compound) and ok
        if tag in ("offsets", "offsets_mod"):
            succ = _theory_symbol(sig, ("offsets", "offsets_mod"), 1)
            if succ is not None:
                ok = _func_over_consts(ordering, sig, succ, report) and ok
                ok = (
                    sample_pairs(
                        "succ>const",
                        lambda: _random_app(succ, sig, rng, depth=rng.randrange(3)),
                    )
                    and ok
                )
        if tag in ("lists", "lists_shostak"):
            cons = _theory_symbol(sig, ("lists", "lists_shostak"), 2)
            nil = sig.symbols.get("nil")
            if cons is not None and nil is not None:
                niltm = App(nil)
                if rng is not None:
                    for _ in range(samples):
                        t = _random_app(cons, sig, rng, depth=rng.randrange(3))
                        if t is not None and ordering.compare(t, niltm) is not GT:
                            report.violations.append(("cons>nil", t, niltm))
                            ok = False
        if tag in ("arrays", "arrays_ext"):
            ok = _array_const_order(ordering, sig, report) and ok
        report.results[tag] = ok
    return report


def _compound_over_const(ordering: Ordering, sig: Signature, report: GoodnessReport) -> bool:
    """Structural check that every ground compound exceeds every constant."""
    consts = sig.constants()
    funcs = sig.functions()
    if not consts or not funcs:
        return True
    if isinstance(ordering, KBO):
        min_compound = min(ordering.weights[f.name] + f.arity for f in funcs)
        max_const = max(ordering.weights[c.name] for c in consts)
        if min_compound > max_const:
            return True
    else:
        if min(ordering.prec[f.name] for f in funcs) > max(
            ordering.prec[c.name] for c in consts
        ):
            return True
    report.violations.append(("compound>const", "structural check failed"))
    return False


def _func_over_consts(ordering: Ordering, sig: Signature, f: Symbol, report: GoodnessReport) -> bool:
    consts = sig.constants()
    if not consts:
        return True
    if isinstance(ordering, KBO):
        if ordering.weights[f.name] + f.arity > max(ordering.weights[c.name] for c in consts):
            return True
    else:
        if ordering.prec[f.name] > max(ordering.prec[c.name] for c in consts):
            return True
    report.violations.append(("%s>const" % f.name, "structural check failed"))
    return False


def _array_const_order(ordering: Ordering, sig: Signature, report: GoodnessReport) -> bool:
    select = _theory_symbol(sig, ("arrays", "arrays_ext"), 2)
    if select is None:
        return True
    array_s, index_s = select.arg_sorts
    elem_s = select.result
    chains: list[tuple[Sort, Sort]] = []
    if elem_s != index_s:
        chains = [(array_s, elem_s), (elem_s, index_s)]
    else:
        chains = [(array_s, elem_s)]
    ok = True
    for hi, lo in chains:
        for a in sig.constants(hi):
            for b in sig.constants(lo):
                if ordering.compare(App(a), App(b)) is not GT:
                    report.violations.append(("const-sort-order", App(a), App(b)))
                    ok = False
    return ok


def _random_app(f: Symbol, sig: Signature, rng, depth: int) -> Optional[Term]:
    args = []
    for s in f.arg_sorts:
        a = random_ground_term(sig, s, rng, depth)
        if a is None:
            return None
        args.append(a)
    return App(f, tuple(args))


def random_ground_term(sig: Signature, sort: Sort, rng, max_depth: int) -> Optional[Term]:
    """Random ground term of a sort, or None if the sort is uninhabited."""
    consts = sig.constants(sort)
    if max_depth > 0:
        makers = [f for f in sig.functions() if f.result == sort]
        if makers and (not consts or rng.random() < 0.6):
            rng.shuffle(makers)
            for f in makers:
                t = _random_app(f, sig, rng, max_depth - 1)
                if t is not None:
                    return t
    if not consts:
        return None
    return App(rng.choice(consts))
