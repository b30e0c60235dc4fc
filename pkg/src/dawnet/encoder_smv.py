"""SMV module for a DAW-net: the infinite-path adaptation of its reachability graph.

The module has a boolean per place, one variable per data variable ranging
over its domain plus `undef`, and a variable `tr` naming the transition about
to fire, or `last` (no transition can fire) or `ended` (the sink state every
run ends in). All formulas are kept as a small AST so the reference
interpreter can evaluate exactly what gets printed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping

from .data_model import format_value, value_key
from .guard_lang import And, Const, Def, Eq, Leq, Not, TrueG
from .model import DawNet, ReachGraph, State

UNDEF = "undef"
LAST = "last"
ENDED = "ended"
TR = "tr"


# ---------------------------------------------------------------- expressions

@dataclass(frozen=True)
class SConst:
    value: bool


@dataclass(frozen=True)
class SIn:
    """var = tok (one token) or var in {toks}; primed refers to the next state."""
    var: str
    tokens: tuple
    primed: bool = False


@dataclass(frozen=True)
class SSame:
    """next(var) = var"""
    var: str


@dataclass(frozen=True)
class SNot:
    sub: object


@dataclass(frozen=True)
class SAnd:
    parts: tuple


@dataclass(frozen=True)
class SOr:
    parts: tuple


@dataclass(frozen=True)
class SImp:
    left: object
    right: object


FALSE = SConst(False)
TRUE_ = SConst(True)


def s_and(parts):
    parts = [p for p in parts if p != TRUE_]
    if any(p == FALSE for p in parts):
        return FALSE
    if not parts:
        return TRUE_
    return parts[0] if len(parts) == 1 else SAnd(tuple(parts))


def s_or(parts):
    parts = [p for p in parts if p != FALSE]
    if any(p == TRUE_ for p in parts):
        return TRUE_
    if not parts:
        return FALSE
    return parts[0] if len(parts) == 1 else SOr(tuple(parts))


def s_eq(var, tok, primed=False):
    return SIn(var, (tok,), primed)


def evaluate3(e, cur: Mapping, nxt: Mapping):
    """Kleene evaluation: True, False, or None when an unassigned variable decides it."""
    if isinstance(e, SConst):
        return e.value
    if isinstance(e, SIn):
        val = (nxt if e.primed else cur).get(e.var)
        if val is None:
            return None
        return val in e.tokens
    if isinstance(e, SSame):
        a, b = cur.get(e.var), nxt.get(e.var)
        return None if a is None or b is None else a == b
    if isinstance(e, SNot):
        r = evaluate3(e.sub, cur, nxt)
        return None if r is None else not r
    if isinstance(e, SAnd):
        unknown = False
        for p in e.parts:
            r = evaluate3(p, cur, nxt)
            if r is False:
                return False
            unknown |= r is None
        return None if unknown else True
    if isinstance(e, SOr):
        unknown = False
        for p in e.parts:
            r = evaluate3(p, cur, nxt)
            if r is True:
                return True
            unknown |= r is None
        return None if unknown else False
    if isinstance(e, SImp):
        return evaluate3(s_or([SNot(e.left), e.right]), cur, nxt)
    raise TypeError(e)


def solutions(e, variables, cur: Mapping, primed: bool):
    """All total assignments to `variables` (list of (name, tokens)) satisfying e, by pruned backtracking.

    With primed=True the assignments are next-state values and `cur` is the current state.
    """
    acc: dict = {}

    def rec(i):
        r = evaluate3(e, cur, acc) if primed else evaluate3(e, acc, {})
        if r is False:
            return
        if i == len(variables):
            if r is None:
                raise AssertionError("formula mentions a variable outside the module")
            yield dict(acc)
            return
        name, toks = variables[i]
        for tok in toks:
            acc[name] = tok
            yield from rec(i + 1)
        del acc[name]

    yield from rec(0)


# ---------------------------------------------------------------- module

@dataclass(frozen=True)
class SmvModule:
    name: str
    vars: tuple                       # (name, tokens) in declaration order
    init: object
    rules: tuple                      # (pre, post)
    ltl: str
    place_var: Mapping[str, str]
    data_var: Mapping[str, str]
    value_token: Mapping[str, Mapping]    # data var -> value_key -> token
    trans_token: Mapping[str, str]         # transition -> tr token
    comments: tuple = ()

    def tokens(self, var):
        for n, toks in self.vars:
            if n == var:
                return toks
        raise KeyError(var)


def _sanitize(x: str) -> str:
    return re.sub(r"[^A-Za-z0-9_]", "_", x)


class _Namer:
    def __init__(self, reserved=()):
        self.taken = set(reserved)

    def __call__(self, base):
        name, k = base, 1
        while name in self.taken:
            name = f"{base}_{k}"
            k += 1
        self.taken.add(name)
        return name


def _value_tokens(w: DawNet, namer: _Namer):
    out = {}
    for v in w.variables:
        m = {}
        for x in w.data.domain(v):
            if type(x) is int:
                m[value_key(x)] = str(x)
            else:
                base = "c_" + _sanitize(format_value(x).strip('"') if type(x) is str else format_value(x))
                m[value_key(x)] = None, base
        out[v] = m
    # symbolic constants are global in SMV, so equal values share a token across variables
    shared = {}
    for v in w.variables:
        for k, tok in out[v].items():
            if isinstance(tok, tuple):
                if k not in shared:
                    shared[k] = namer(tok[1])
                out[v][k] = shared[k]
    return out


def encode_state(m: SmvModule, w: DawNet, s: State, t) -> dict:
    """enc(M, eta) and enc(t): the SMV state of the triple (M, eta, t)."""
    q = encode_state_raw(w, m.place_var, m.data_var, m.value_token, s)
    q[TR] = t if t in (LAST, ENDED) else m.trans_token[t]
    return q


def encode_smv(w: DawNet, drop_frame: bool = False, drop_last_init: bool = False) -> SmvModule:
    """The SMV module of w. The two flags exist for mutation tests only."""
    namer = _Namer({UNDEF, LAST, ENDED, TR, "TRUE", "FALSE"})
    pv = {p: namer("p_" + _sanitize(p)) for p in w.places}
    dv = {v: namer("v_" + _sanitize(v)) for v in w.variables}
    tt = {t: namer("t_" + _sanitize(t)) for t in w.transitions}
    vt = _value_tokens(w, namer)
    rng = {v: tuple(vt[v][value_key(x)] for x in w.data.domain(v)) for v in w.variables}

    variables = [(pv[p], ("FALSE", "TRUE")) for p in w.places]
    variables += [(dv[v], (UNDEF,) + rng[v]) for v in w.variables]
    variables.append((TR, tuple(tt[t] for t in w.transitions) + (LAST, ENDED)))

    def tok(v, c):
        return vt[v].get(value_key(c))

    def guard(phi, primed):
        if isinstance(phi, TrueG):
            return TRUE_
        if isinstance(phi, Def):
            return SNot(s_eq(dv[phi.var], UNDEF, primed))
        if isinstance(phi, Eq):
            a = phi.lhs.name
            if isinstance(phi.rhs, Const):
                k = tok(a, phi.rhs.value)
                return FALSE if k is None else s_eq(dv[a], k, primed)
            b = phi.rhs.name
            common = [x for x in w.data.domain(a) if tok(b, x) is not None]
            return s_or([s_and([s_eq(dv[a], tok(a, x), primed), s_eq(dv[b], tok(b, x), primed)]) for x in common])
        if isinstance(phi, Leq):
            lt, rt = phi.left, phi.right
            if isinstance(lt, Const) and isinstance(rt, Const):
                return SConst(w.data.leq(lt.value, rt.value))
            if isinstance(rt, Const):
                ok = tuple(tok(lt.name, x) for x in w.data.domain(lt.name) if w.data.leq(x, rt.value))
                return SIn(dv[lt.name], ok, primed) if ok else FALSE
            if isinstance(lt, Const):
                ok = tuple(tok(rt.name, x) for x in w.data.domain(rt.name) if w.data.leq(lt.value, x))
                return SIn(dv[rt.name], ok, primed) if ok else FALSE
            pairs = [s_and([s_eq(dv[lt.name], tok(lt.name, x), primed), s_eq(dv[rt.name], tok(rt.name, y), primed)])
                     for x in w.data.domain(lt.name) for y in w.data.domain(rt.name) if w.data.leq(x, y)]
            return s_or(pairs)
        if isinstance(phi, Not):
            g = guard(phi.sub, primed)
            return SConst(not g.value) if isinstance(g, SConst) else SNot(g)
        if isinstance(phi, And):
            return s_and([guard(phi.left, primed), guard(phi.right, primed)])
        raise TypeError(phi)

    def pre(t, primed):
        return s_and([s_eq(pv[p], "TRUE", primed) for p in sorted(w.net.preset(t))] + [guard(w.guards[t], primed)])

    def choose_tr(primed):
        parts = [SImp(s_eq(TR, tt[t], primed), pre(t, primed)) for t in w.transitions]
        parts.append(SImp(s_eq(TR, LAST, primed), s_and([SNot(pre(t, primed)) for t in w.transitions])))
        return parts

    def eps_next():
        return ([s_eq(pv[p], "FALSE", True) for p in w.places]
                + [s_eq(dv[v], UNDEF, True) for v in w.variables])

    s0 = encode_state_raw(w, pv, dv, vt, w.initial_state())
    init_parts = [s_eq(n, tok_) for n, tok_ in s0.items()]
    init_parts.append(SNot(s_eq(TR, ENDED)))
    init_parts += choose_tr(False)[: len(w.transitions) + (0 if drop_last_init else 1)]
    init = s_and(init_parts)

    rules = []
    for t in w.transitions:
        pre_t, post_t = w.net.preset(t), w.net.postset(t)
        post = []
        for p in w.places:
            if p in pre_t and p not in post_t:
                post.append(s_eq(pv[p], "FALSE", True))
            elif p in post_t and p not in pre_t:
                post.append(s_eq(pv[p], "TRUE", True))
            elif not drop_frame:
                post.append(SSame(pv[p]))
        wr = w.writes[t]
        for v in w.variables:
            if v in wr and wr[v]:
                post.append(SIn(dv[v], tuple(vt[v][value_key(x)] for x in wr[v]), True))
            elif v in wr:
                post.append(s_eq(dv[v], UNDEF, True))
            elif not drop_frame:
                post.append(SSame(dv[v]))
        post += choose_tr(True)
        post.append(SImp(s_eq(TR, ENDED, True), s_eq(TR, LAST)))
        rules.append((s_eq(TR, tt[t]), SAnd(tuple(post))))
    rules.append((s_eq(TR, LAST), s_and([s_eq(TR, ENDED, True)] + eps_next())))
    rules.append((s_eq(TR, ENDED), s_and([s_eq(TR, ENDED, True)] + eps_next())))

    comments = [f"{pv[p]} = place {p}" for p in w.places]
    comments += [f"{dv[v]} = variable {v}" for v in w.variables]
    comments += [f"{tt[t]} = transition {t}" for t in w.transitions]
    for v in w.variables:
        for x in w.data.domain(v):
            k = vt[v][value_key(x)]
            if k != str(x) or type(x) is not int:
                comments.append(f"{k} = {format_value(x)}")
    comments = list(dict.fromkeys(comments))
    return SmvModule(w.name, tuple(variables), init, tuple(rules), ltl_goal(w, pv), pv, dv, vt, tt, tuple(comments))


def encode_state_raw(w, pv, dv, vt, s: State) -> dict:
    q = {pv[p]: ("TRUE" if s.marking[p] > 0 else "FALSE") for p in w.places}
    for v in w.variables:
        q[dv[v]] = vt[v][value_key(s.eta[v])] if v in s.eta else UNDEF
    return q


def ltl_goal(w: DawNet, place_names: Mapping[str, str] | None = None) -> str:
    """LTLSPEC G !(sink & !p1 & ...): a counterexample is a run reaching the final marking."""
    pv = place_names or {p: "p_" + _sanitize(p) for p in w.places}
    lits = [pv[w.sink]] + [f"!{pv[p]}" for p in w.places if p != w.sink]
    return f"LTLSPEC G !({' & '.join(lits)})"


# ---------------------------------------------------------------- printing

def _expr(e, top=False) -> str:
    if isinstance(e, SConst):
        return "TRUE" if e.value else "FALSE"
    if isinstance(e, SIn):
        var = f"next({e.var})" if e.primed else e.var
        if len(e.tokens) == 1:
            return f"{var} = {e.tokens[0]}"
        return f"{var} in {{{', '.join(e.tokens)}}}"
    if isinstance(e, SSame):
        return f"next({e.var}) = {e.var}"
    if isinstance(e, SNot):
        return f"!({_expr(e.sub, True)})"
    if isinstance(e, SAnd):
        s = " & ".join(_expr(p) for p in e.parts)
        return s if top else f"({s})"
    if isinstance(e, SOr):
        s = " | ".join(_expr(p) for p in e.parts)
        return s if top else f"({s})"
    if isinstance(e, SImp):
        return f"({_expr(e.left)} -> {_expr(e.right)})"
    raise TypeError(e)


def print_smv(m: SmvModule) -> str:
    L = [f"-- {m.name}"]
    L += [f"-- {c}" for c in m.comments]
    L.append("MODULE main")
    L.append("VAR")
    for n, toks in m.vars:
        if toks == ("FALSE", "TRUE"):
            L.append(f"  {n} : boolean;")
        else:
            L.append(f"  {n} : {{{', '.join(toks)}}};")
    L.append("INIT")
    parts = m.init.parts if isinstance(m.init, SAnd) else (m.init,)
    L.append("  " + "\n  & ".join(_expr(p, True) for p in parts))
    L.append("TRANS")
    L.append("  case")
    for pre, post in m.rules:
        parts = post.parts if isinstance(post, SAnd) else (post,)
        L.append(f"    {_expr(pre, True)} :")
        L.append("      " + "\n      & ".join(_expr(p, True) for p in parts) + ";")
    L.append("  esac")
    L.append(m.ltl)
    return "\n".join(L) + "\n"


# ---------------------------------------------------------------- RG~

EPSILON = "s_eps"


@dataclass
class RgTilde:
    """States are (State, t) with t a transition, LAST or ENDED; s_eps is (EPSILON state, ENDED)."""

    states: list
    initial: list
    edges: dict = field(default_factory=dict)

    def successors(self, s):
        return [(s[1], x) for x in self.edges[s]]


def build_rg_tilde(rg: ReachGraph, w: DawNet) -> RgTilde:
    """Move labels into source states, send dead ends through `last` to a looping s_eps."""
    from .core_net import Marking
    from .data_model import EMPTY
    eps = (State(Marking(w.places, [0] * len(w.places)), EMPTY), ENDED)
    out_t = {i: sorted({t for t, _ in rg.successors_of(i)}) for i in range(len(rg.states))}

    def heads(j):
        return [(rg.states[j], t) for t in out_t[j]] or [(rg.states[j], LAST)]

    edges: dict = {eps: [eps]}
    initial = heads(rg.initial)
    todo = list(initial)
    seen = set(initial) | {eps}
    while todo:
        s = todo.pop()
        st, t = s
        if t == LAST:
            edges[s] = [eps]
            continue
        i = rg.index(st)
        nxt = []
        for t2, j in rg.successors_of(i):
            if t2 == t:
                nxt.extend(heads(j))
        edges[s] = nxt
        for x in nxt:
            if x not in seen:
                seen.add(x)
                todo.append(x)
    return RgTilde(sorted(seen, key=repr), initial, edges)


def rg_tilde_successors(rgt: RgTilde):
    """Edges labelled with the t component of the source state."""
    return rgt.successors


def smv_state_key(m: SmvModule, w: DawNet, triple) -> tuple:
    """enc_smv of an RG~ state, frozen to match ref_semantics.ts_smv states."""
    return tuple(sorted(encode_state(m, w, *triple).items()))
