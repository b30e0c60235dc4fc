"""The guard query language: AST, parser, printer, evaluator and ground DNF.

Concrete syntax::

    phi  := conj ('&&' conj)*
    conj := '!' conj | 'true' | 'def' '(' var ')' | '(' phi ')' | term '=' term | term '<=' term
    term := var | integer | "string" | true | false

Bare identifiers are variables; string constants are double-quoted.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from .data_model import (DataModel, UnknownVariable, Value, format_value, same_value,
                         sort_values, value_key)


# ---------------------------------------------------------------- AST

@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    value: Value

    def __eq__(self, other):
        return isinstance(other, Const) and same_value(self.value, other.value)

    def __hash__(self):
        return hash(value_key(self.value))

    def __str__(self):
        return format_value(self.value)


Term = Union[Var, Const]


@dataclass(frozen=True)
class TrueG:
    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Def:
    var: str

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Eq:
    lhs: Var
    rhs: Term

    def __post_init__(self):
        if not isinstance(self.lhs, Var):
            raise TypeError("the left side of = must be a variable")

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Leq:
    left: Term
    right: Term

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Not:
    sub: "GuardExpr"

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class And:
    left: "GuardExpr"
    right: "GuardExpr"

    def __str__(self):
        return to_text(self)


GuardExpr = Union[TrueG, Def, Eq, Leq, Not, And]
TRUE = TrueG()


def conj(parts: Iterable[GuardExpr]) -> GuardExpr:
    """Left-nested conjunction; the empty conjunction is true."""
    out = None
    for p in parts:
        out = p if out is None else And(out, p)
    return TRUE if out is None else out


def neg(phi: GuardExpr) -> GuardExpr:
    return Not(phi)


def variables(phi: GuardExpr) -> set[str]:
    out = set()
    for node in _walk(phi):
        if isinstance(node, Def):
            out.add(node.var)
        elif isinstance(node, Var):
            out.add(node.name)
    return out


def _walk(phi):
    stack = [phi]
    while stack:
        n = stack.pop()
        yield n
        if isinstance(n, Not):
            stack.append(n.sub)
        elif isinstance(n, And):
            stack.extend((n.right, n.left))
        elif isinstance(n, Eq):
            stack.extend((n.rhs, n.lhs))
        elif isinstance(n, Leq):
            stack.extend((n.right, n.left))


def active_domain(phi: GuardExpr) -> tuple[Value, ...]:
    """Constants occurring in phi, as a canonically sorted tuple without duplicates."""
    return sort_values(n.value for n in _walk(phi) if isinstance(n, Const))


# ---------------------------------------------------------------- parser

class GuardSyntaxError(SyntaxError):
    def __init__(self, text, pos, expected):
        self.text, self.pos, self.expected = text, pos, expected
        super().__init__(f"at column {pos + 1}: expected {expected} in {text!r}")


class ConstantOutsideDomains(ValueError):
    def __init__(self, value):
        self.value = value
        super().__init__(f"constant {format_value(value)} is not in any declared domain")


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<and>&&)
  | (?P<leq><=)
  | (?P<op>[!=(),])
  | (?P<int>-?\d+)
  | (?P<str>"(?:[^"\\]|\\.)*")
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
""", re.VERBOSE)


def _tokenize(text):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise GuardSyntaxError(text, pos, "a token")
        kind = m.lastgroup
        if kind != "ws":
            val = m.group(kind)
            out.append((kind if kind != "op" else val, val, pos))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k=0):
        return self.toks[self.i + k]

    def take(self, kind, expected=None):
        tok = self.toks[self.i]
        if tok[0] != kind:
            raise GuardSyntaxError(self.text, tok[2], expected or repr(kind))
        self.i += 1
        return tok

    def formula(self):
        left = self.unary()
        while self.peek()[0] == "and":
            self.i += 1
            left = And(left, self.unary())
        return left

    def unary(self):
        kind, val, pos = self.peek()
        if kind == "!":
            self.i += 1
            return Not(self.unary())
        if kind == "(":
            # a parenthesis opens a formula; a parenthesised term is not in the grammar
            self.i += 1
            inner = self.formula()
            self.take(")", "')'")
            return inner
        if kind == "id" and val == "true" and self.peek(1)[0] not in ("=", "leq"):
            self.i += 1
            return TRUE
        if kind == "id" and val == "def" and self.peek(1)[0] == "(":
            self.i += 2
            name = self.take("id", "a variable name")[1]
            self.take(")", "')'")
            return Def(name)
        left = self.term()
        kind, _, pos = self.peek()
        if kind == "=":
            self.i += 1
            if not isinstance(left, Var):
                raise GuardSyntaxError(self.text, pos, "a variable on the left of '='")
            return Eq(left, self.term())
        if kind == "leq":
            self.i += 1
            return Leq(left, self.term())
        raise GuardSyntaxError(self.text, pos, "'=' or '<='")

    def term(self):
        kind, val, pos = self.peek()
        self.i += 1
        if kind == "int":
            return Const(int(val))
        if kind == "str":
            return Const(json.loads(val))
        if kind == "id":
            if val == "true":
                return Const(True)
            if val == "false":
                return Const(False)
            return Var(val)
        raise GuardSyntaxError(self.text, pos, "a variable or constant")


def parse(text: str, data: DataModel | None = None) -> GuardExpr:
    """Parse a guard. With `data`, variables and constants are checked against it."""
    p = _Parser(text)
    phi = p.formula()
    tok = p.peek()
    if tok[0] != "eof":
        raise GuardSyntaxError(text, tok[2], "'&&' or end of input")
    if data is not None:
        check_guard(phi, data)
    return phi


def check_guard(phi: GuardExpr, data: DataModel) -> None:
    for v in sorted(variables(phi)):
        if v not in data.domains:
            raise UnknownVariable(v)
    for c in active_domain(phi):
        if not data.in_some_domain(c):
            raise ConstantOutsideDomains(c)


# ---------------------------------------------------------------- printer

def _term_text(t: Term) -> str:
    return t.name if isinstance(t, Var) else format_value(t.value)


def to_text(phi: GuardExpr) -> str:
    """Canonical text; parse(to_text(phi)) == phi."""
    if isinstance(phi, TrueG):
        return "true"
    if isinstance(phi, Def):
        return f"def({phi.var})"
    if isinstance(phi, Eq):
        return f"{_term_text(phi.lhs)} = {_term_text(phi.rhs)}"
    if isinstance(phi, Leq):
        return f"{_term_text(phi.left)} <= {_term_text(phi.right)}"
    if isinstance(phi, Not):
        sub = phi.sub
        if isinstance(sub, (TrueG, Def, Not)):
            return "!" + to_text(sub)
        return f"!({to_text(sub)})"
    if isinstance(phi, And):
        right = to_text(phi.right)
        if isinstance(phi.right, And):
            right = f"({right})"
        return f"{to_text(phi.left)} && {right}"
    raise TypeError(f"not a guard: {phi!r}")


# ---------------------------------------------------------------- semantics

def _subst(t: Term, eta: Mapping[str, Value]):
    """(True, value) when the term denotes a constant under eta, else (False, None)."""
    if isinstance(t, Const):
        return True, t.value
    if t.name in eta:
        return True, eta[t.name]
    return False, None


def evaluate(phi: GuardExpr, data: DataModel, eta: Mapping[str, Value]) -> bool:
    """Truth of phi in (data, eta). Comparisons with an unassigned variable are false."""
    if isinstance(phi, TrueG):
        return True
    if isinstance(phi, Def):
        return phi.var in eta
    if isinstance(phi, Eq):
        ok1, a = _subst(phi.lhs, eta)
        ok2, b = _subst(phi.rhs, eta)
        return ok1 and ok2 and same_value(a, b)
    if isinstance(phi, Leq):
        ok1, a = _subst(phi.left, eta)
        ok2, b = _subst(phi.right, eta)
        return ok1 and ok2 and data.leq(a, b)
    if isinstance(phi, Not):
        return not evaluate(phi.sub, data, eta)
    if isinstance(phi, And):
        return evaluate(phi.left, data, eta) and evaluate(phi.right, data, eta)
    raise TypeError(f"not a guard: {phi!r}")


def compile_guard(phi: GuardExpr, data: DataModel, index: Mapping[str, int]):
    """Closure over an assignment tuple (None = unassigned) with the semantics of `evaluate`."""
    if isinstance(phi, TrueG):
        return lambda e: True
    if isinstance(phi, Def):
        i = index[phi.var]
        return lambda e: e[i] is not None
    if isinstance(phi, (Eq, Leq)):
        l, r = (phi.lhs, phi.rhs) if isinstance(phi, Eq) else (phi.left, phi.right)
        if isinstance(phi, Eq):
            cmp = same_value
        else:
            cmp = data.leq
        getl = _getter(l, index)
        getr = _getter(r, index)

        def atom(e):
            a = getl(e)
            if a is None:
                return False
            b = getr(e)
            return b is not None and cmp(a, b)
        return atom
    if isinstance(phi, Not):
        f = compile_guard(phi.sub, data, index)
        return lambda e: not f(e)
    if isinstance(phi, And):
        f = compile_guard(phi.left, data, index)
        g = compile_guard(phi.right, data, index)
        return lambda e: f(e) and g(e)
    raise TypeError(f"not a guard: {phi!r}")


def _getter(t, index):
    if isinstance(t, Const):
        c = t.value
        return lambda e: c
    i = index[t.name]
    return lambda e: e[i]


# ---------------------------------------------------------------- ground DNF

@dataclass(frozen=True, order=True)
class EqLit:
    var: str
    value: Value

    def key(self):
        return (self.var, 0, value_key(self.value))

    def __str__(self):
        return f"{self.var} = {format_value(self.value)}"


@dataclass(frozen=True)
class NotDefLit:
    var: str

    def key(self):
        return (self.var, 1, ())

    def __str__(self):
        return f"!def({self.var})"


Literal = Union[EqLit, NotDefLit]


class DnfBlowup(Exception):
    def __init__(self, phi, cap):
        self.phi, self.cap = phi, cap
        super().__init__(f"DNF of {to_text(phi)} exceeds {cap} clauses")


@dataclass(frozen=True)
class DnfGuard:
    """Disjunction of conjunctive clauses over Eq(v, const) and NotDef(v) literals.

    `undef_caveat` lists variables for which a negated comparison was rewritten
    without its unassigned case, so the DNF may be false where the guard is true.
    """

    clauses: tuple[tuple[Literal, ...], ...]
    undef_caveat: frozenset = frozenset()

    def holds(self, eta: Mapping[str, Value]) -> bool:
        return any(all(_lit_holds(l, eta) for l in c) for c in self.clauses)

    def __str__(self):
        if not self.clauses:
            return "false"
        return " || ".join("(" + " && ".join(map(str, c)) + ")" if c else "true" for c in self.clauses)


def _lit_holds(lit, eta):
    if isinstance(lit, NotDefLit):
        return lit.var not in eta
    return lit.var in eta and same_value(eta[lit.var], lit.value)


def eval_dnf(d: DnfGuard, eta: Mapping[str, Value]) -> bool:
    return d.holds(eta)


_UNDEF = object()


class _Dnf:
    """Clauses as dicts var -> value or _UNDEF, dropped when inconsistent."""

    def __init__(self, phi, data, ranges, strict, cap):
        self.phi, self.data, self.strict, self.cap = phi, data, strict, cap
        self.ranges = {v: sort_values(r) for v, r in ranges.items()}
        self.caveat = set()

    def rng(self, v):
        try:
            return self.ranges[v]
        except KeyError:
            raise UnknownVariable(v) from None

    def go(self, phi, pos):
        if isinstance(phi, TrueG):
            return [{}] if pos else []
        if isinstance(phi, Not):
            return self.go(phi.sub, not pos)
        if isinstance(phi, And):
            if pos:
                return self.product(self.go(phi.left, True), self.go(phi.right, True))
            return self.union(self.go(phi.left, False), self.go(phi.right, False))
        if isinstance(phi, Def):
            if pos:
                return [{phi.var: o} for o in self.rng(phi.var)]
            return [{phi.var: _UNDEF}]
        if isinstance(phi, Eq):
            return self.compare(phi.lhs, phi.rhs, same_value, pos)
        if isinstance(phi, Leq):
            return self.compare(phi.left, phi.right, self.data.leq, pos)
        raise TypeError(f"not a guard: {phi!r}")

    def compare(self, l, r, rel, pos):
        lvals = [l.value] if isinstance(l, Const) else self.rng(l.name)
        rvals = [r.value] if isinstance(r, Const) else self.rng(r.name)
        out = []
        for a in lvals:
            for b in rvals:
                if rel(a, b) != pos:
                    continue
                clause = {}
                ok = True
                for t, x in ((l, a), (r, b)):
                    if isinstance(t, Var):
                        if t.name in clause and not same_value(clause[t.name], x):
                            ok = False
                        clause[t.name] = x
                if ok:
                    out.append(clause)
        if not pos:
            vs = [t.name for t in (l, r) if isinstance(t, Var)]
            if self.strict:
                # the comparison is false, hence its negation true, when an operand is unassigned
                out.extend({v: _UNDEF} for v in dict.fromkeys(vs))
            else:
                self.caveat.update(vs)
        self.check(out)
        return out

    def union(self, a, b):
        out = a + b
        self.check(out)
        return out

    def product(self, a, b):
        out = []
        for x in a:
            for y in b:
                merged = dict(x)
                ok = True
                for v, val in y.items():
                    if v in merged:
                        old = merged[v]
                        if (old is _UNDEF) != (val is _UNDEF) or (old is not _UNDEF and not same_value(old, val)):
                            ok = False
                            break
                    merged[v] = val
                if ok:
                    out.append(merged)
                    if len(out) > self.cap:
                        raise DnfBlowup(self.phi, self.cap)
        return out

    def check(self, out):
        if len(out) > self.cap:
            raise DnfBlowup(self.phi, self.cap)


def _lit(v, val):
    return NotDefLit(v) if val is _UNDEF else EqLit(v, val)


def to_ground_dnf(phi: GuardExpr, data: DataModel, ranges: Mapping[str, Iterable[Value]],
                  strict_undef: bool = False, cap: int = 10**5) -> DnfGuard:
    """Ground DNF of phi over finite variable ranges.

    By default the negated comparisons are rewritten over the range only, which
    drops the unassigned case; affected variables are reported in `undef_caveat`.
    With strict_undef=True each negated comparison also gets a NotDef clause per
    variable operand, which makes the result equivalent to phi whenever every
    assigned value lies in its range.
    """
    worker = _Dnf(phi, data, ranges, strict_undef, cap)
    raw = worker.go(phi, True)
    seen = {}
    for clause in raw:
        lits = tuple(sorted((_lit(v, x) for v, x in clause.items()), key=lambda l: l.key()))
        k = tuple(l.key() for l in lits)
        seen.setdefault(k, lits)
    clauses = tuple(seen[k] for k in sorted(seen))
    return DnfGuard(clauses, frozenset(worker.caveat))
