"""Problem file I/O.

Two renderings share one metadata header written as % comments: the sort
list, every symbol with its rank and origin, the theory specs, the expected
status and the suggested precedence scheme.

The native format stores the refutation input, one ground literal per
cnf line (hypotheses plus the negated goal), and parses back losslessly;
rendering is byte-stable, so render(parse(render(x))) == render(x).  The
first-order format keeps the original implication (hypotheses as axioms,
the goal as a conjecture) for consumption by external provers; it is
emit-only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .clauses import Literal
from .terms import Signature, Term, Var
from .theories import TheorySpec, parse_theory, spec_string

FORMAT_VERSION = 1

NATIVE, FOF = "native", "fof"
FORMATS = (NATIVE, FOF)


class ProbFileError(Exception):
    """Malformed problem file."""


@dataclass
class ProblemFile:
    """Parsed problem: everything `solve` needs to rebuild and saturate."""

    name: str
    theories: tuple[TheorySpec, ...]
    signature: Signature
    literals: tuple[Literal, ...]
    expected: str = ""
    scheme: str = "good-lpo"
    family: str = ""
    n: int = 0
    k: int = 0
    meta: dict = field(default_factory=dict)


def from_instance(inst, scheme: str = "good-lpo") -> ProblemFile:
    return ProblemFile(
        name=inst.name,
        theories=tuple(inst.theories),
        signature=inst.signature,
        literals=tuple(inst.literals()),
        expected=inst.expected,
        scheme=scheme,
        family=inst.family,
        n=inst.n,
        k=inst.k,
    )


def _header_lines(pf: ProblemFile) -> list[str]:
    out = [
        "% spdecide problem format " + str(FORMAT_VERSION),
        "% problem: " + pf.name,
    ]
    if pf.family:
        out.append("% family: " + pf.family)
    if pf.n:
        out.append("% n: " + str(pf.n))
    if pf.k:
        out.append("% k: " + str(pf.k))
    if pf.expected:
        out.append("% expected: " + pf.expected)
    out.append("% scheme: " + pf.scheme)
    for spec in pf.theories:
        out.append("% theory: " + spec_string(spec))
    sig = pf.signature
    for sname in sig.sorts:
        out.append("% sort: " + sname)
    # declaration order; symbol indexes survive the round trip
    for sym in sorted(sig.symbols.values(), key=lambda s: s.index):
        tags = " origin=" + sym.origin
        if sym.theory:
            tags += " theory=" + sym.theory
        if sym.arity:
            rank = "%s : %s -> %s" % (
                sym.name,
                ",".join(s.name for s in sym.arg_sorts),
                sym.result.name,
            )
            out.append("% func: " + rank + tags)
        else:
            out.append("% const: " + "%s : %s" % (sym.name, sym.result.name) + tags)
    return out


def literal_text(lit: Literal) -> str:
    op = "=" if lit.positive else "!="
    return "%r %s %r" % (lit.lhs, op, lit.rhs)


def render_native(pf: ProblemFile) -> str:
    lines = _header_lines(pf)
    roles = ["hypothesis"] * len(pf.literals)
    if pf.family and roles:
        # benchmark instances end with the negated goal
        roles[-1] = "negated_conjecture"
    for i, (lit, role) in enumerate(zip(pf.literals, roles), 1):
        name = "goal" if role == "negated_conjecture" else "hyp_%d" % i
        lines.append("cnf(%s, %s, %s)." % (name, role, literal_text(lit)))
    return "\n".join(lines) + "\n"


def render_fof(inst, scheme: str = "good-lpo") -> str:
    """First-order rendering of a benchmark Instance (emit-only)."""
    pf = from_instance(inst, scheme)
    lines = _header_lines(pf)
    for i, lit in enumerate(inst.hypotheses, 1):
        lines.append("fof(hyp_%d, axiom, %s)." % (i, literal_text(lit)))
    lines.append("fof(goal, conjecture, %s)." % literal_text(inst.goal))
    return "\n".join(lines) + "\n"


_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class _TermParser:
    """Recursive descent over one literal; TPTP convention, names starting
    with an upper-case letter are variables."""

    def __init__(self, text: str, sig: Signature, vars_seen: dict):
        self.text = text
        self.pos = 0
        self.sig = sig
        self.vars = vars_seen

    def error(self, msg: str):
        raise ProbFileError("%s at %r" % (msg, self.text[self.pos:self.pos + 20]))

    def ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def eat(self, s: str) -> bool:
        self.ws()
        if self.text.startswith(s, self.pos):
            self.pos += len(s)
            return True
        return False

    def name(self) -> str:
        self.ws()
        m = _NAME.match(self.text, self.pos)
        if not m:
            self.error("expected a name")
        self.pos = m.end()
        return m.group(0)

    def term(self, want_sort: Optional[str] = None) -> Term:
        n = self.name()
        if n[0].isupper():
            if n in self.vars:
                return self.vars[n]
            if want_sort is None:
                self.error("cannot infer the sort of variable %s" % n)
            v = self.sig.var(n, want_sort)
            self.vars[n] = v
            return v
        if n not in self.sig.symbols:
            self.error("undeclared symbol %s" % n)
        sym = self.sig.sym(n)
        args = []
        if self.eat("("):
            while True:
                want = sym.arg_sorts[len(args)].name if len(args) < sym.arity else None
                args.append(self.term(want))
                if self.eat(")"):
                    break
                if not self.eat(","):
                    self.error("expected , or )")
        if len(args) != sym.arity:
            self.error("%s expects %d arguments, got %d" % (n, sym.arity, len(args)))
        return self.sig.app(n, *args)

    def literal(self) -> Literal:
        lhs = self.term()
        self.ws()
        if self.eat("!="):
            positive = False
        elif self.eat("="):
            positive = True
        else:
            self.error("expected = or !=")
        rhs = self.term(lhs.sort.name)
        self.ws()
        if self.pos != len(self.text):
            self.error("trailing input")
        return Literal(lhs, rhs, positive)


_CNF = re.compile(r"cnf\(\s*([A-Za-z0-9_]+)\s*,\s*([A-Za-z0-9_]+)\s*,\s*(.*)\)\s*\.\s*$")
_TAG = re.compile(r"(origin|theory)=(\S+)")


def _parse_symbol_line(kind: str, body: str, sig: Signature) -> Signature:
    tags = dict(_TAG.findall(body))
    body = _TAG.sub("", body).strip()
    name, _, rank = body.partition(":")
    name = name.strip()
    rank = rank.strip()
    if kind == "const":
        args: tuple = ()
        result = rank
    else:
        argpart, _, result = rank.partition("->")
        args = tuple(a.strip() for a in argpart.strip().split(",") if a.strip())
        result = result.strip()
    if not name or not result:
        raise ProbFileError("malformed %s line: %r" % (kind, body))
    return sig.declare(
        name, args, result, origin=tags.get("origin", "input"), theory=tags.get("theory")
    )


def parse_native(text: str, name: str = "") -> ProblemFile:
    sig = Signature()
    theories: list[TheorySpec] = []
    literals: list[Literal] = []
    meta: dict = {}
    vars_seen: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        try:
            if line.startswith("%"):
                body = line[1:].strip()
                key, sep, val = body.partition(":")
                if not sep:
                    continue
                key = key.strip()
                val = val.strip()
                if key == "theory":
                    theories.append(parse_theory(val))
                elif key == "sort":
                    sig = sig.add_sort(val)
                elif key in ("func", "const"):
                    sig = _parse_symbol_line(key, val, sig)
                elif key in ("problem", "family", "expected", "scheme"):
                    meta[key] = val
                elif key in ("n", "k"):
                    meta[key] = int(val)
                continue
            m = _CNF.match(line)
            if not m:
                raise ProbFileError("expected a cnf(...) clause")
            cname, role, body = m.groups()
            parts = body.split("|")
            if len(parts) != 1:
                raise ProbFileError("only unit input clauses are supported")
            literals.append(_TermParser(parts[0].strip(), sig, vars_seen).literal())
        except ProbFileError as e:
            raise ProbFileError("line %d: %s" % (lineno, e)) from None
    if not literals:
        raise ProbFileError("no clauses found")
    if any(lit.lhs.vars or lit.rhs.vars for lit in literals):
        raise ProbFileError("input literals must be ground")
    return ProblemFile(
        name=meta.get("problem", name or "problem"),
        theories=tuple(theories),
        signature=sig,
        literals=tuple(literals),
        expected=meta.get("expected", ""),
        scheme=meta.get("scheme", "good-lpo"),
        family=meta.get("family", ""),
        n=meta.get("n", 0),
        k=meta.get("k", 0),
        meta=meta,
    )


def render(inst, fmt: str = NATIVE, scheme: str = "good-lpo") -> str:
    if fmt == NATIVE:
        return render_native(from_instance(inst, scheme))
    if fmt == FOF:
        return render_fof(inst, scheme)
    raise ProbFileError("unknown format %r (choose from %s)" % (fmt, "/".join(FORMATS)))
