"""BC action-language encoding of a DAW-net and its translation to ASP programs.

Fluents: one boolean fluent per place, one per variable over its value range
plus `null`, and the bookkeeping fluent `trans`. Actions are the transitions.
`translate_asp` produces the program P_l whose stable models are the runs of
length l.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .data_model import format_value, same_value
from .guard_lang import EqLit, Not, to_ground_dnf
from .model import DawNet


class _Null:
    __slots__ = ()

    def __repr__(self):
        return "NULL"

    def __reduce__(self):
        return "NULL"


NULL = _Null()
TRANS = "trans"


class BcError(ValueError):
    pass


@dataclass(frozen=True)
class FAtom:
    """fluent = value"""
    fluent: str
    value: object

    def __str__(self):
        return f"{self.fluent}={_val_text(self.value)}"


@dataclass(frozen=True)
class AAtom:
    action: str

    def __str__(self):
        return self.action


@dataclass(frozen=True)
class Law:
    """`head if if_ ifcons ifcons after after`; head None is `false`; dynamic iff `after` is non-empty."""
    head: FAtom | None
    if_: tuple = ()
    ifcons: tuple = ()
    after: tuple = ()
    tag: str = ""

    @property
    def dynamic(self) -> bool:
        return bool(self.after)


@dataclass(frozen=True)
class BcProgram:
    name: str
    fluents: tuple[tuple[str, tuple], ...]
    actions: tuple[str, ...]
    static_laws: tuple[Law, ...]
    dynamic_laws: tuple[Law, ...]
    initially: tuple[FAtom, ...]
    finally_: tuple[FAtom, ...]
    null: str = "null"
    place_fluent: dict = field(default_factory=dict)     # place -> fluent name
    var_fluent: dict = field(default_factory=dict)       # variable -> fluent name
    action_of: dict = field(default_factory=dict)        # transition -> action name

    def domain(self, fluent: str) -> tuple:
        for f, dom in self.fluents:
            if f == fluent:
                return dom
        raise KeyError(fluent)

    def laws(self) -> tuple[Law, ...]:
        return self.static_laws + self.dynamic_laws


def same_fluent_value(a, b) -> bool:
    if a is NULL or b is NULL:
        return a is b
    return same_value(a, b)


def _val_text(v, null="null"):
    if v is NULL:
        return null
    return format_value(v)


def _names(w: DawNet) -> tuple[dict, dict, dict]:
    taken = {TRANS}
    out = []
    for group in (w.places, w.variables, w.transitions):
        m = {}
        for x in group:
            name = x
            k = 1
            while name in taken:
                name = f"{x}_{k}"
                k += 1
            taken.add(name)
            m[x] = name
        out.append(m)
    return tuple(out)


def encode_state(prog: BcProgram, w: DawNet, state) -> dict:
    """The total fluent assignment of a DAW-net state (trans is true in every reachable state)."""
    out = {}
    for p, f in prog.place_fluent.items():
        out[f] = state.marking[p] > 0
    for v, f in prog.var_fluent.items():
        out[f] = state.eta[v] if v in state.eta else NULL
    out[TRANS] = True
    return out


def encode_bc(w: DawNet, null: str = "null", exact_guards: bool = True, cap: int = 10**5) -> BcProgram:
    """BC laws for w. Variable ranges are the values each variable can be written with.

    With exact_guards (the default) negated comparisons in guards keep their
    unassigned case, so a transition whose guard holds because a variable is
    undefined is not wrongly blocked.
    """
    pf, vf, af = _names(w)
    ranges = {v: w.value_range(v) for v in w.variables}
    for v, rng in ranges.items():
        for x in rng:
            if x == null or format_value(x) == null:
                raise BcError(f"null constant {null!r} collides with a value of {v}")
    live = [v for v in w.variables if ranges[v]]
    fluents = [(pf[p], (False, True)) for p in w.places]
    fluents += [(vf[v], (NULL,) + ranges[v]) for v in live]
    fluents.append((TRANS, (False, True)))
    actions = tuple(af[t] for t in w.transitions)
    dyn: list[Law] = []

    for v in live:
        for o in (NULL,) + ranges[v]:
            a = FAtom(vf[v], o)
            dyn.append(Law(a, (), (a,), (a,), "inertia"))
    for p in w.places:
        for b in (False, True):
            a = FAtom(pf[p], b)
            dyn.append(Law(a, (), (a,), (a,), "inertia"))

    for t in w.transitions:
        act = AAtom(af[t])
        pre, post = w.net.preset(t), w.net.postset(t)
        for p in sorted(pre - post):
            dyn.append(Law(FAtom(pf[p], False), (), (), (act,), "consume"))
        for p in sorted(post - pre):
            dyn.append(Law(FAtom(pf[p], True), (), (), (act,), "produce"))
        for v, vals in w.writes[t].items():
            if vals:
                for d in vals:
                    a = FAtom(vf[v], d)
                    dyn.append(Law(a, (), (a,), (act,), "write"))
                for d in (NULL,) + ranges[v]:
                    if d is NULL or not any(same_value(d, x) for x in vals):
                        dyn.append(Law(None, (), (FAtom(vf[v], d),), (act,), "write-range"))
            elif v in vf and ranges[v]:
                dyn.append(Law(FAtom(vf[v], NULL), (), (), (act,), "delete"))
        dyn.append(Law(FAtom(TRANS, True), (), (), (act,), "trans"))

    for i, t in enumerate(w.transitions):
        for s in w.transitions[i + 1:]:
            dyn.append(Law(None, (), (), (AAtom(af[t]), AAtom(af[s])), "mutex"))
    for t in w.transitions:
        for p in sorted(w.net.preset(t)):
            dyn.append(Law(None, (), (), (AAtom(af[t]), FAtom(pf[p], False)), "enabled"))

    for t in w.transitions:
        dnf = to_ground_dnf(Not(w.guards[t]), w.data, ranges, strict_undef=exact_guards, cap=cap)
        for clause in dnf.clauses:
            body = []
            ok = True
            for lit in clause:
                if isinstance(lit, EqLit):
                    if not ranges[lit.var]:
                        ok = False      # the variable can never hold a value
                        break
                    body.append(FAtom(vf[lit.var], lit.value))
                elif ranges[lit.var]:
                    body.append(FAtom(vf[lit.var], NULL))
                # NotDef on a never-written variable is always true: drop the literal
            if ok:
                dyn.append(Law(None, (), (), (AAtom(af[t]),) + tuple(body), "guard"))

    init = [FAtom(pf[p], p == w.source) for p in w.places]
    init += [FAtom(vf[v], NULL) for v in live]
    init.append(FAtom(TRANS, True))
    fin = [FAtom(pf[p], p == w.sink) for p in w.places]
    return BcProgram(w.name, tuple(fluents), actions, (), tuple(dyn), tuple(init), tuple(fin), null,
                     dict(pf), {v: vf[v] for v in live}, dict(af))


# ---------------------------------------------------------------- printing

_SAFE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _bc_id(x: str) -> str:
    return x if _SAFE.match(x) else '"' + x.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _bc_atom(a, null):
    if isinstance(a, AAtom):
        return _bc_id(a.action)
    return f"{_bc_id(a.fluent)}={_val_text(a.value, null)}"


def print_bc(b: BcProgram) -> str:
    lines = [f"% BC action description for {b.name}",
             f"% {len(b.fluents)} fluents, {len(b.actions)} actions, {len(b.laws())} laws"]
    for f, dom in b.fluents:
        lines.append(f"fluent {_bc_id(f)} : {{{', '.join(_val_text(x, b.null) for x in dom)}}}.")
    for a in b.actions:
        lines.append(f"action {_bc_id(a)}.")
    for law in b.laws():
        head = "false" if law.head is None else _bc_atom(law.head, b.null)
        parts = [head]
        if law.if_:
            parts.append("if " + ", ".join(_bc_atom(a, b.null) for a in law.if_))
        if law.after:
            parts.append("after " + ", ".join(_bc_atom(a, b.null) for a in law.after))
        if law.ifcons:
            parts.append("ifcons " + ", ".join(_bc_atom(a, b.null) for a in law.ifcons))
        lines.append(" ".join(parts) + ".")
    for a in b.initially:
        lines.append(f"initially {_bc_atom(a, b.null)}.")
    for a in b.finally_:
        lines.append(f"finally {_bc_atom(a, b.null)}.")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- ASP translation

@dataclass(frozen=True)
class TAtom:
    """A timed atom i:A, possibly strongly negated."""
    atom: FAtom | AAtom
    time: int
    neg: bool = False

    def negate(self) -> "TAtom":
        return TAtom(self.atom, self.time, not self.neg)


@dataclass(frozen=True)
class Rule:
    """head1 | head2 :- pos, not naf. An empty head is a constraint."""
    head: tuple[TAtom, ...]
    pos: tuple[TAtom, ...] = ()
    naf: tuple[TAtom, ...] = ()


@dataclass(frozen=True)
class AspProgram:
    horizon: int
    rules: tuple[Rule, ...]
    bc: BcProgram


def translate_asp(b: BcProgram, horizon: int, with_goal: bool = True, with_initial: bool = True) -> AspProgram:
    """The program P_l for l = horizon."""
    if horizon < 0:
        raise ValueError("horizon must be non-negative")
    rules: list[Rule] = []
    for law in b.static_laws:
        for i in range(horizon + 1):
            rules.append(Rule(_head(law, i), tuple(TAtom(a, i) for a in law.if_),
                              tuple(TAtom(a, i, True) for a in law.ifcons)))
    for law in b.dynamic_laws:
        for i in range(horizon):
            rules.append(Rule(_head(law, i + 1), tuple(TAtom(a, i) for a in law.after),
                              tuple(TAtom(a, i + 1, True) for a in law.ifcons)))
    if with_initial:
        for a in b.initially:
            rules.append(Rule((TAtom(a, 0),)))
    for f, dom in b.fluents:
        for v in dom:
            a = TAtom(FAtom(f, v), 0)
            rules.append(Rule((a, a.negate())))
    for i in range(horizon):
        for act in b.actions:
            a = TAtom(AAtom(act), i)
            rules.append(Rule((a, a.negate())))
    for i in range(horizon + 1):
        for f, dom in b.fluents:
            rules.append(Rule((), (), tuple(TAtom(FAtom(f, v), i) for v in dom)))
            for v in dom:
                for u in dom:
                    if not same_fluent_value(u, v):
                        rules.append(Rule((TAtom(FAtom(f, v), i, True),), (TAtom(FAtom(f, u), i),)))
    for a in _all_timed_atoms(b, horizon):
        rules.append(Rule((), (a, a.negate())))
    if with_goal:
        for a in b.finally_:
            rules.append(Rule((), (), (TAtom(a, horizon),)))
    return AspProgram(horizon, tuple(rules), b)


def _head(law, i):
    return () if law.head is None else (TAtom(law.head, i),)


def _all_timed_atoms(b: BcProgram, horizon: int):
    for i in range(horizon + 1):
        for f, dom in b.fluents:
            for v in dom:
                yield TAtom(FAtom(f, v), i)
        if i < horizon:
            for act in b.actions:
                yield TAtom(AAtom(act), i)


_LOWER = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


def _asp_const(x: str) -> str:
    if _LOWER.match(x):
        return x
    return '"' + x.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _asp_value(v, null):
    if v is NULL:
        return _asp_const(null)
    if type(v) is bool:
        return "true" if v else "false"
    if type(v) is int:
        return str(v)
    return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _asp_atom(a: TAtom, null) -> str:
    sign = "-" if a.neg else ""
    if isinstance(a.atom, AAtom):
        return f"{sign}occurs({_asp_const(a.atom.action)},{a.time})"
    return f"{sign}holds({_asp_const(a.atom.fluent)},{_asp_value(a.atom.value, null)},{a.time})"


def print_asp(p: AspProgram) -> str:
    null = p.bc.null
    lines = [f"% ASP program P_{p.horizon} for {p.bc.name}", f"% {len(p.rules)} rules"]
    for r in p.rules:
        head = " | ".join(_asp_atom(a, null) for a in r.head)
        body = [_asp_atom(a, null) for a in r.pos] + ["not " + _asp_atom(a, null) for a in r.naf]
        if body:
            lines.append(f"{head} :- {', '.join(body)}." if head else f":- {', '.join(body)}.")
        else:
            lines.append(f"{head}.")
    return "\n".join(lines) + "\n"
