"""State-variable planning encoding of a DAW-net, its classical lowering, and PDDL output.

Every place is a boolean state variable and every data variable a state
variable ranging over its written values plus `null`. A transition t becomes
the template t(z_v ...) with one parameter per variable in dom(wr(t)), whose
admissible values are given by the rigid unary relation wr_t_v.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field, replace
from typing import Mapping

from .data_model import format_value, value_key
from .encoder_bc import NULL, _names, same_fluent_value
from .guard_lang import And as GAnd, Def, DnfBlowup, Eq, Leq, Not as GNot, TrueG, Var, active_domain
from .model import DawNet, State


# ---------------------------------------------------------------- precondition language

@dataclass(frozen=True)
class SV:
    """A state variable."""
    name: str


@dataclass(frozen=True)
class Par:
    name: str


@dataclass(frozen=True)
class Obj:
    value: object

    def __eq__(self, other):
        return isinstance(other, Obj) and same_fluent_value(self.value, other.value)

    def __hash__(self):
        return hash(("obj", "null" if self.value is NULL else value_key(self.value)))


@dataclass(frozen=True)
class PTrue:
    pass


@dataclass(frozen=True)
class PEq:
    left: object
    right: object


@dataclass(frozen=True)
class PRel:
    rel: str
    args: tuple


@dataclass(frozen=True)
class PNot:
    sub: object


@dataclass(frozen=True)
class PAnd:
    parts: tuple


@dataclass(frozen=True)
class POr:
    parts: tuple


def _and(parts):
    flat = []
    for p in parts:
        if isinstance(p, PAnd):
            flat.extend(p.parts)
        elif not isinstance(p, PTrue):
            flat.append(p)
    if not flat:
        return PTrue()
    return flat[0] if len(flat) == 1 else PAnd(tuple(flat))


@dataclass(frozen=True)
class ActionTemplate:
    name: str
    params: tuple[str, ...]
    pre: object
    eff: tuple[tuple[str, object], ...]        # (state variable, Par or Obj)
    origin: str                                  # the DAW-net transition
    param_var: Mapping[str, str] = field(default_factory=dict)   # parameter -> state variable it ranges over


@dataclass(frozen=True)
class SvDomain:
    name: str
    objects: tuple                                # every value object, NULL included
    state_vars: tuple[tuple[str, tuple], ...]     # (name, range)
    rigid: Mapping[str, frozenset]                # relation name -> set of argument tuples
    templates: tuple[ActionTemplate, ...]
    place_var: Mapping[str, str]
    data_var: Mapping[str, str]
    classical: bool = False
    null: str = "null"

    def range_of(self, sv: str) -> tuple:
        for n, r in self.state_vars:
            if n == sv:
                return r
        raise KeyError(sv)

    def surjection(self) -> dict[str, str]:
        """Template name -> originating transition."""
        return {a.name: a.origin for a in self.templates}


def wr_relation(t: str, v: str) -> str:
    return f"wr_{t}_{v}"


def psi(d: SvDomain, w: DawNet, s: State) -> tuple:
    """The planning state of a DAW-net state, as a sorted tuple of (state variable, value)."""
    out = {}
    for p, sv in d.place_var.items():
        out[sv] = s.marking[p] > 0
    for v, sv in d.data_var.items():
        out[sv] = s.eta[v] if v in s.eta else NULL
    return tuple(sorted(out.items()))


def psi_inverse(d: SvDomain, w: DawNet, q) -> State:
    from .core_net import Marking
    from .data_model import Assignment
    q = dict(q)
    marking = Marking.of(w.net, [p for p, sv in d.place_var.items() if q[sv]])
    eta = Assignment((v, q[sv]) for v, sv in d.data_var.items() if q[sv] is not NULL)
    return State(marking, eta)


def _guard(phi, vf, null_check=True) -> object:
    """Guard to precondition: def(v) -> v != null, v = t -> v != null and v = t, t1 <= t2 -> ord(t1, t2)."""
    def term(t):
        return SV(vf[t.name]) if isinstance(t, Var) else Obj(t.value)

    if isinstance(phi, TrueG):
        return PTrue()
    if isinstance(phi, Def):
        return PNot(PEq(SV(vf[phi.var]), Obj(NULL)))
    if isinstance(phi, Eq):
        eq = PEq(term(phi.lhs), term(phi.rhs))
        return _and([PNot(PEq(SV(vf[phi.lhs.name]), Obj(NULL))), eq]) if null_check else eq
    if isinstance(phi, Leq):
        return PRel("ord", (term(phi.left), term(phi.right)))
    if isinstance(phi, GNot):
        return PNot(_guard(phi.sub, vf, null_check))
    if isinstance(phi, GAnd):
        return _and([_guard(phi.left, vf, null_check), _guard(phi.right, vf, null_check)])
    raise TypeError(phi)


def encode_sv(w: DawNet, null: str = "null", eq_null_check: bool = True):
    """State-variable domain, initial state and goal literals for w.

    eq_null_check=False drops the `v != null` conjunct of equalities; it exists for mutation tests.
    """
    pf, vf, tf = _names(w)
    ranges = {v: w.value_range(v) for v in w.variables}
    state_vars = [(pf[p], (False, True)) for p in w.places]
    state_vars += [(vf[v], (NULL,) + ranges[v]) for v in w.variables]
    values = {value_key(x): x for v in w.variables for x in ranges[v]}
    for g in w.guards.values():
        for c in active_domain(g):
            values[value_key(c)] = c
    objects = (NULL,) + tuple(values[k] for k in sorted(values))
    rigid = {"ord": frozenset((a, b) for a in objects[1:] for b in objects[1:] if w.data.leq(a, b))}
    templates = []
    for t in w.transitions:
        params, pmap, pre, eff = [], {}, [], []
        pre.append(_guard(w.guards[t], vf, eq_null_check))
        for v, vals in w.writes[t].items():
            z = f"z_{vf[v]}"
            params.append(z)
            pmap[z] = vf[v]
            rel = wr_relation(tf[t], vf[v])
            rigid[rel] = frozenset((x,) for x in vals) if vals else frozenset({(NULL,)})
            pre.append(PRel(rel, (Par(z),)))
            eff.append((vf[v], Par(z)))
        for p in sorted(w.net.preset(t)):
            pre.append(PEq(SV(pf[p]), Obj(True)))
        pre_t, post_t = w.net.preset(t), w.net.postset(t)
        for p in sorted(pre_t - post_t):
            eff.append((pf[p], Obj(False)))
        for p in sorted(post_t):
            eff.append((pf[p], Obj(True)))
        templates.append(ActionTemplate(tf[t], tuple(params), _and(pre), tuple(eff), t, pmap))
    d = SvDomain(w.name, objects, tuple(state_vars), rigid, tuple(templates), dict(pf),
                 dict(vf), False, null)
    s0 = psi(d, w, w.initial_state())
    goal = tuple((pf[p], p == w.sink) for p in w.places)
    return d, s0, goal


# ---------------------------------------------------------------- lowering

def _nnf_dnf(phi, pos, cap):
    """Clauses (lists of (positive, atom)) of phi or its negation."""
    if isinstance(phi, PTrue):
        return [[]] if pos else []
    if isinstance(phi, PNot):
        return _nnf_dnf(phi.sub, not pos, cap)
    if isinstance(phi, (PAnd, POr)):
        conj = isinstance(phi, PAnd) == pos
        parts = [_nnf_dnf(p, pos, cap) for p in phi.parts]
        if not conj:
            out = [c for part in parts for c in part]
        else:
            out = [[]]
            for part in parts:
                out = [a + b for a in out for b in part]
                if len(out) > cap:
                    raise DnfBlowup(phi, cap)
        if len(out) > cap:
            raise DnfBlowup(phi, cap)
        return out
    return [[(pos, phi)]]


def lower_classical(d: SvDomain, cap: int = 10**5) -> SvDomain:
    """Split templates on the DNF of their preconditions and move state variables out of rigid atoms.

    A state variable v used inside a rigid atom or on the right of an equality
    is replaced by a parameter x_v, linked by the conjunct v = x_v. A template
    whose precondition has k > 1 clauses yields templates name_1 .. name_k.
    """
    out = []
    for a in d.templates:
        clauses = _nnf_dnf(a.pre, True, cap)
        for k, clause in enumerate(clauses, 1):
            links = {}
            lits = []

            def lift(term):
                if isinstance(term, SV):
                    x = f"x_{term.name}"
                    links[term.name] = x
                    return Par(x)
                return term

            for positive, atom in clause:
                if isinstance(atom, PRel):
                    atom = PRel(atom.rel, tuple(lift(t) for t in atom.args))
                elif isinstance(atom, PEq):
                    left, right = atom.left, atom.right
                    if not isinstance(left, SV) and isinstance(right, SV):
                        left, right = right, left
                    if isinstance(left, SV):
                        atom = PEq(left, lift(right))
                    else:
                        atom = PEq(left, right)
                lits.append(atom if positive else PNot(atom))
            params = list(a.params)
            pmap = dict(a.param_var)
            for sv, x in sorted(links.items()):
                params.append(x)
                pmap[x] = sv
                lits.append(PEq(SV(sv), Par(x)))
            name = a.name if len(clauses) == 1 else f"{a.name}_{k}"
            out.append(ActionTemplate(name, tuple(params), _and(lits), a.eff, a.origin, pmap))
    return replace(d, templates=tuple(out), classical=True)


# ---------------------------------------------------------------- semantics (used by ts_pddl)

def _term_value(t, state, binding):
    if isinstance(t, SV):
        return state[t.name]
    if isinstance(t, Par):
        return binding[t.name]
    return t.value


def _rel_key(args):
    return tuple("null" if x is NULL else value_key(x) for x in args)


def holds(d: SvDomain, phi, state: Mapping, binding: Mapping, rigid_keys: Mapping | None = None) -> bool:
    if rigid_keys is None:
        rigid_keys = {r: {_rel_key(t) for t in tuples} for r, tuples in d.rigid.items()}
    if isinstance(phi, PTrue):
        return True
    if isinstance(phi, PEq):
        return same_fluent_value(_term_value(phi.left, state, binding), _term_value(phi.right, state, binding))
    if isinstance(phi, PRel):
        return _rel_key([_term_value(t, state, binding) for t in phi.args]) in rigid_keys.get(phi.rel, ())
    if isinstance(phi, PNot):
        return not holds(d, phi.sub, state, binding, rigid_keys)
    if isinstance(phi, PAnd):
        return all(holds(d, p, state, binding, rigid_keys) for p in phi.parts)
    if isinstance(phi, POr):
        return any(holds(d, p, state, binding, rigid_keys) for p in phi.parts)
    raise TypeError(phi)


def ground_actions(d: SvDomain, a: ActionTemplate):
    """All parameter bindings; each parameter ranges over the range of the state variable it stands for."""
    doms = [d.range_of(a.param_var[p]) for p in a.params]
    for combo in itertools.product(*doms):
        yield dict(zip(a.params, combo))


def apply_action(a: ActionTemplate, state: Mapping, binding: Mapping) -> dict:
    """gamma: assigned state variables take their new values, the rest are kept."""
    out = dict(state)
    for sv, term in a.eff:
        out[sv] = _term_value(term, state, binding)
    return out


# ---------------------------------------------------------------- PDDL text

def _mangle_table(d: SvDomain):
    """Case-insensitive unique PDDL names for values, state variables and templates."""
    taken = set()

    def fresh(base):
        base = re.sub(r"[^a-z0-9_-]", "_", base.lower())
        if not base or not base[0].isalpha():
            base = "x" + base
        name, k = base, 1
        while name in taken:
            name = f"{base}_{k}"
            k += 1
        taken.add(name)
        return name

    vals = {}
    for x in d.objects:
        if x is NULL:
            vals["null"] = fresh(d.null)
    for x in d.objects:
        if x is NULL:
            continue
        if type(x) is bool:
            base = f"b_{'true' if x else 'false'}"
        elif type(x) is int:
            base = f"n{x}" if x >= 0 else f"nm{-x}"
        else:
            base = f"s_{x}"
        vals[value_key(x)] = fresh(base)
    svs = {}
    for sv, rng in d.state_vars:
        if rng == (False, True):
            svs[sv] = fresh(f"marked_{sv}")
        else:
            svs[sv] = fresh(f"var_{sv}")
    acts = {a.name: fresh(a.name) for a in d.templates}
    rels = {r: fresh(r) for r in sorted(d.rigid)}
    return vals, svs, acts, rels


def _is_place(d, sv):
    return sv in d.place_var.values()


def print_pddl(d: SvDomain, s0, goal) -> tuple[str, str]:
    if not d.classical:
        raise ValueError("print_pddl needs a lowered (classical) domain")
    vals, svs, acts, rels = _mangle_table(d)

    def vname(x):
        return vals["null"] if x is NULL else vals[value_key(x)]

    def pname(a, p):
        # z_/x_ prefix plus the mangled variable name: unique within a template
        return f"?{p[0]}_{svs[a.param_var[p]].removeprefix('var_')}"

    cur = {}

    def term(t):
        if isinstance(t, Par):
            return pname(cur["a"], t.name)
        if isinstance(t, Obj):
            return vname(t.value)
        raise ValueError(t)

    def lit(phi):
        neg = isinstance(phi, PNot)
        atom = phi.sub if neg else phi
        if isinstance(atom, PEq):
            sv = atom.left.name
            if _is_place(d, sv):
                val = atom.right.value
                text = f"({svs[sv]})"
                if val is False:
                    neg = not neg
            else:
                text = f"(value {svs[sv]} {term(atom.right)})"
        elif isinstance(atom, PRel):
            text = f"({rels[atom.rel]} {' '.join(term(x) for x in atom.args)})"
        else:
            raise ValueError(atom)
        return f"(not {text})" if neg else text

    data_svs = [sv for sv, _ in d.state_vars if not _is_place(d, sv)]
    place_svs = [sv for sv, _ in d.state_vars if _is_place(d, sv)]
    L = [f"; domain for {d.name}"]
    for sv, rng in d.state_vars:
        if not _is_place(d, sv):
            L.append(f";   {svs[sv]} = {sv}")
    for x in d.objects:
        L.append(f";   {vname(x)} = {d.null if x is NULL else format_value(x)}")
    L.append(f"(define (domain {re.sub(r'[^a-z0-9_-]', '_', d.name.lower())})")
    L.append("  (:requirements :strips :typing :negative-preconditions)")
    L.append("  (:types variable value)")
    L.append("  (:constants")
    if data_svs:
        L.append("    " + " ".join(svs[sv] for sv in data_svs) + " - variable")
    L.append("    " + " ".join(vname(x) for x in d.objects) + " - value)")
    L.append("  (:predicates")
    for sv in place_svs:
        L.append(f"    ({svs[sv]})")
    if data_svs:
        L.append("    (value ?var - variable ?val - value)")
    for r in sorted(d.rigid):
        arity = 2 if r == "ord" else 1
        args = " ".join(f"?a{i} - value" for i in range(arity))
        L.append(f"    ({rels[r]} {args})")
    L.append("  )")
    for a in d.templates:
        cur["a"] = a
        L.append(f"  (:action {acts[a.name]}")
        L.append(f"    :parameters ({' '.join(pname(a, p) + ' - value' for p in a.params)})")
        parts = a.pre.parts if isinstance(a.pre, PAnd) else (() if isinstance(a.pre, PTrue) else (a.pre,))
        L.append("    :precondition (and " + " ".join(lit(p) for p in parts) + ")")
        eff = []
        linked = {}
        for p in a.params:
            if p.startswith("x_"):
                linked[a.param_var[p]] = p
        for sv, t in a.eff:
            if _is_place(d, sv):
                eff.append(f"({svs[sv]})" if t.value else f"(not ({svs[sv]}))")
            else:
                old = linked.get(sv)
                if old is None:
                    raise ValueError(f"{a.name}: no parameter holds the old value of {sv}")
                eff.append(f"(not (value {svs[sv]} {pname(a, old)}))")
                eff.append(f"(value {svs[sv]} {term(t)})")
        L.append("    :effect (and " + " ".join(eff) + "))")
    L.append(")")
    domain = "\n".join(L) + "\n"

    P = [f"; problem for {d.name}",
         f"(define (problem {re.sub(r'[^a-z0-9_-]', '_', d.name.lower())}-reach)",
         f"  (:domain {re.sub(r'[^a-z0-9_-]', '_', d.name.lower())})",
         "  (:init"]
    s0 = dict(s0)
    for sv in place_svs:
        if s0[sv]:
            P.append(f"    ({svs[sv]})")
    for sv in data_svs:
        P.append(f"    (value {svs[sv]} {vname(s0[sv])})")
    for r in sorted(d.rigid):
        for args in sorted(d.rigid[r], key=_rel_key):
            P.append(f"    ({rels[r]} {' '.join(vname(x) for x in args)})")
    P.append("  )")
    goal_lits = [f"({svs[sv]})" if val else f"(not ({svs[sv]}))" for sv, val in goal]
    P.append("  (:goal (and " + " ".join(goal_lits) + "))")
    P.append(")")
    return domain, "\n".join(P) + "\n"


def with_old_value_links(d: SvDomain) -> SvDomain:
    """Make every written data variable have an x_v parameter linked to its current value.

    Classical STRIPS effects must delete the old (value v ?old) fact, so the old
    value has to be a parameter.
    """
    out = []
    for a in d.templates:
        params = list(a.params)
        pmap = dict(a.param_var)
        extra = []
        for sv, _ in a.eff:
            if _is_place(d, sv):
                continue
            x = f"x_{sv}"
            if x not in params:
                params.append(x)
                pmap[x] = sv
                extra.append(PEq(SV(sv), Par(x)))
        out.append(replace(a, params=tuple(params), param_var=pmap, pre=_and([a.pre] + extra)))
    return replace(d, templates=tuple(out))


def encode_pddl(w: DawNet, null: str = "null") -> tuple[str, str]:
    """domain.pddl and problem.pddl text for w."""
    d, s0, goal = encode_sv(w, null)
    low = with_old_value_links(lower_classical(d))
    return print_pddl(low, s0, goal)
