"""Many-sorted first-order terms, signatures, substitutions, unification, flattening.

Terms are immutable and hash-consed enough for hot loops: depth, variable set
and hash are computed once at construction.  Constants are nullary applications,
so every non-variable term has a head symbol.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

ORIGIN_INPUT = "input"
ORIGIN_FLAT = "flattening"
ORIGIN_SKOLEM = "skolem"


@dataclass(frozen=True)
class Sort:
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Symbol:
    """A function symbol with a fixed rank.

    `index` is the declaration order inside its signature; precedence schemes
    use it as the final tie-break.  `theory` tags symbols owned by a theory
    presentation (None for free symbols), `origin` separates input symbols from
    constants invented by flattening or skolemization.
    """

    name: str
    arg_sorts: tuple[Sort, ...]
    result: Sort
    index: int
    origin: str = ORIGIN_INPUT
    theory: Optional[str] = None

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)

    def __repr__(self) -> str:
        return self.name


class Term:
    __slots__ = ()


class Var(Term):
    __slots__ = ("name", "sort", "_hash")

    depth = 0
    ground = False

    def __init__(self, name: str, sort: Sort):
        self.name = name
        self.sort = sort
        self._hash = hash(("v", name, sort.name))

    @property
    def vars(self) -> frozenset:
        return frozenset((self,))

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, Var)
            and self._hash == other._hash
            and self.name == other.name
            and self.sort == other.sort
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return self.name


class App(Term):
    __slots__ = ("sym", "args", "depth", "ground", "vars", "_hash", "_tkey")

    def __init__(self, sym: Symbol, args: tuple[Term, ...] = ()):
        self.sym = sym
        self.args = args
        if args:
            self.depth = 1 + max(a.depth for a in args)
            self.ground = all(a.ground for a in args)
            if self.ground:
                self.vars = frozenset()
            else:
                self.vars = frozenset().union(*(a.vars for a in args))
        else:
            self.depth = 0
            self.ground = True
            self.vars = frozenset()
        self._hash = hash((sym.name, args))
        self._tkey = None

    @property
    def sort(self) -> Sort:
        return self.sym.result

    @property
    def is_const(self) -> bool:
        return not self.args

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, App)
            and self._hash == other._hash
            and self.sym == other.sym
            and self.args == other.args
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        if not self.args:
            return self.sym.name
        return "%s(%s)" % (self.sym.name, ",".join(map(repr, self.args)))


def is_const(t: Term) -> bool:
    return isinstance(t, App) and not t.args


class SignatureError(Exception):
    pass


class Signature:
    """Sorts plus ranked symbols.  `declare` is copy-on-write: signatures are
    never mutated after they escape, so they can be shared across threads."""

    def __init__(self):
        self.sorts: dict[str, Sort] = {}
        self.symbols: dict[str, Symbol] = {}

    def copy(self) -> "Signature":
        sig = Signature.__new__(Signature)
        sig.sorts = dict(self.sorts)
        sig.symbols = dict(self.symbols)
        return sig

    def add_sort(self, name: str) -> "Signature":
        if name in self.sorts:
            return self
        sig = self.copy()
        sig.sorts[name] = Sort(name)
        return sig

    def sort(self, name: str) -> Sort:
        return self.sorts[name]

    def declare(
        self,
        name: str,
        arg_sorts: Iterable[str],
        result: str,
        origin: str = ORIGIN_INPUT,
        theory: Optional[str] = None,
    ) -> "Signature":
        """Add a symbol.  Re-declaring with the same rank is a no-op; with a
        different rank, or the same function symbol claimed by two theories,
        it is an error (constants may be shared across theories)."""
        args = tuple(arg_sorts)
        if name in self.symbols:
            old = self.symbols[name]
            if tuple(s.name for s in old.arg_sorts) != args or old.result.name != result:
                raise SignatureError("conflicting declarations for %s" % name)
            if old.arity > 0 and theory is not None and old.theory is not None and old.theory != theory:
                raise SignatureError(
                    "function symbol %s shared between theories %s and %s"
                    % (name, old.theory, theory)
                )
            return self
        sig = self
        for s in (*args, result):
            sig = sig.add_sort(s)
        sig = sig.copy() if sig is self else sig
        sym = Symbol(
            name,
            tuple(sig.sorts[s] for s in args),
            sig.sorts[result],
            index=len(sig.symbols),
            origin=origin,
            theory=theory,
        )
        sig.symbols[name] = sym
        return sig

    def sym(self, name: str) -> Symbol:
        return self.symbols[name]

    def const(self, name: str) -> App:
        sym = self.symbols[name]
        if sym.arity:
            raise SignatureError("%s is not a constant" % name)
        return App(sym)

    def app(self, name: str, *args: Term) -> App:
        sym = self.symbols[name]
        if len(args) != sym.arity:
            raise SignatureError("%s expects %d arguments" % (name, sym.arity))
        for a, s in zip(args, sym.arg_sorts):
            if a.sort != s:
                raise SignatureError(
                    "%s: argument %r has sort %s, expected %s" % (name, a, a.sort, s)
                )
        return App(sym, args)

    def var(self, name: str, sort: str) -> Var:
        return Var(name, self.sorts[sort])

    def constants(self, sort: Optional[Sort] = None) -> list[Symbol]:
        out = [s for s in self.symbols.values() if s.arity == 0]
        if sort is not None:
            out = [s for s in out if s.result == sort]
        return out

    def functions(self) -> list[Symbol]:
        return [s for s in self.symbols.values() if s.arity > 0]

    def fresh_name(self, prefix: str) -> str:
        i = 1
        while "%s%d" % (prefix, i) in self.symbols:
            i += 1
        return "%s%d" % (prefix, i)


Subst = dict  # Var -> Term


def apply_subst(t: Term, sigma: Subst) -> Term:
    if t.ground or not sigma:
        return t
    if isinstance(t, Var):
        return sigma.get(t, t)
    return App(t.sym, tuple(apply_subst(a, sigma) for a in t.args))


def compose(sigma: Subst, binding_var: Var, binding_term: Term) -> None:
    """Destructively add var -> term, keeping sigma idempotent."""
    one = {binding_var: binding_term}
    for v in list(sigma):
        sigma[v] = apply_subst(sigma[v], one)
    sigma[binding_var] = binding_term


def occurs(v: Var, t: Term) -> bool:
    return v in t.vars


def unify(s: Term, t: Term, sigma: Optional[Subst] = None) -> Optional[Subst]:
    """Most general unifier with occurs check, or None.  The result is
    idempotent.  Sorts must agree for a variable binding to be formed."""
    sigma = {} if sigma is None else dict(sigma)
    stack = [(s, t)]
    while stack:
        a, b = stack.pop()
        a = apply_subst(a, sigma)
        b = apply_subst(b, sigma)
        if a == b:
            continue
        if isinstance(a, Var):
            if a.sort != b.sort or occurs(a, b):
                return None
            compose(sigma, a, b)
        elif isinstance(b, Var):
            if b.sort != a.sort or occurs(b, a):
                return None
            compose(sigma, b, a)
        else:
            if a.sym != b.sym:
                return None
            stack.extend(zip(a.args, b.args))
    return sigma


def match(pattern: Term, target: Term, sigma: Optional[Subst] = None) -> Optional[Subst]:
    """One-sided matching: find sigma with pattern*sigma == target.  Variables
    of the target are treated as constants."""
    sigma = {} if sigma is None else dict(sigma)
    stack = [(pattern, target)]
    while stack:
        p, t = stack.pop()
        if isinstance(p, Var):
            bound = sigma.get(p)
            if bound is None:
                if p.sort != t.sort:
                    return None
                sigma[p] = t
            elif bound != t:
                return None
        else:
            if not isinstance(t, App) or p.sym != t.sym:
                return None
            stack.extend(zip(p.args, t.args))
    return sigma


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


def positions(t: Term) -> Iterator[tuple[tuple[int, ...], Term]]:
    """All positions, root first, as (path, subterm) pairs."""
    yield (), t
    if isinstance(t, App):
        for i, a in enumerate(t.args):
            for path, sub in positions(a):
                yield (i, *path), sub


def replace_at(t: Term, path: tuple[int, ...], new: Term) -> Term:
    if not path:
        return new
    assert isinstance(t, App)
    i = path[0]
    args = list(t.args)
    args[i] = replace_at(args[i], path[1:], new)
    return App(t.sym, tuple(args))


class NonGroundError(Exception):
    pass


def literal_depth(lhs: Term, rhs: Term) -> int:
    return lhs.depth + rhs.depth


def flatten(literals, signature: Signature):
    """Flatten ground literals: positive results have depth <= 1, negative
    results have depth 0.  Every distinct non-constant subterm is named by one
    fresh constant (origin "flattening"); syntactically identical subterms
    share their name.  Returns (flat literals, extended signature).

    Defining equations come out before the literal they support, in a
    deterministic bottom-up, left-to-right order.  Raises NonGroundError on
    non-ground input.
    """
    from .clauses import Literal  # cycle: clauses imports terms

    sig = signature
    defs: dict[App, App] = {}
    out: list = []
    counter = [0]

    def fresh(sort: Sort) -> App:
        nonlocal sig
        while True:
            counter[0] += 1
            name = "_flat%d" % counter[0]
            if name not in sig.symbols:
                break
        sig = sig.declare(name, (), sort.name, origin=ORIGIN_FLAT)
        return sig.const(name)

    def shallow(t: Term) -> App:
        """Rebuild t with named arguments: depth <= 1 afterwards."""
        assert isinstance(t, App)
        return App(t.sym, tuple(a if is_const(a) else name_of(a) for a in t.args))

    def name_of(t: Term) -> App:
        """Constant naming t, creating the defining equation if needed."""
        flat = shallow(t)
        c = defs.get(flat)
        if c is None:
            c = fresh(t.sort)
            defs[flat] = c
            out.append(Literal(flat, c, True))
        return c

    for lit in literals:
        if not (lit.lhs.ground and lit.rhs.ground):
            raise NonGroundError("flatten requires ground literals: %r" % (lit,))
        l, r = lit.lhs, lit.rhs
        if lit.positive:
            if literal_depth(l, r) <= 1:
                out.append(lit)
                # a flat equation f(..) = c doubles as the name of f(..)
                if l.depth == 1 and is_const(r) and l not in defs:
                    defs[l] = r
                elif r.depth == 1 and is_const(l) and r not in defs:
                    defs[r] = l
            elif is_const(r):
                flat = shallow(l)
                if flat in defs:
                    out.append(Literal(defs[flat], r, True))
                else:
                    defs[flat] = r
                    out.append(Literal(flat, r, True))
            elif is_const(l):
                flat = shallow(r)
                if flat in defs:
                    out.append(Literal(defs[flat], l, True))
                else:
                    defs[flat] = l
                    out.append(Literal(flat, l, True))
            else:
                c1 = name_of(l)
                c2 = name_of(r)
                out.append(Literal(c1, c2, True))
        else:
            a = l if is_const(l) else name_of(l)
            b = r if is_const(r) else name_of(r)
            out.append(Literal(a, b, False))
    return out, sig
