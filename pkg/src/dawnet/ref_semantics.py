"""Reference interpreters for the three encodings, used to test them against the reachability graph.

* ASP: a small stable-model enumerator (search over the Clark completion,
  every model re-checked against the Gelfond-Lifschitz reduct).
* BC: the transition system of a BC program, built from stable models of P_1.
* PDDL: the state-variable transition system of the lowered domain.
* SMV: successor enumeration for the emitted module.

`trace_equiv` walks a reachability graph and a transition system in lock step
and reports the first path on which they differ.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .encoder_bc import (AAtom, AspProgram, BcProgram, FAtom, NULL, Rule, TAtom, encode_state,
                         translate_asp)


class CapError(Exception):
    pass


# ---------------------------------------------------------------- stable models

class StableModels:
    """Stable models of a ground program whose disjunctions are all of the form A | -A."""

    def __init__(self, rules: Sequence[Rule]):
        self.atoms: list = []
        self.index: dict = {}
        norm = []
        for r in rules:
            if len(r.head) > 2:
                raise ValueError("only A | -A disjunctions are supported")
            if len(r.head) == 2:
                a, b = r.head
                if b != a.negate():
                    raise ValueError("only A | -A disjunctions are supported")
                # head-cycle-free: shift into two normal rules
                norm.append((a, r.pos, r.naf + (b,)))
                norm.append((b, r.pos, r.naf + (a,)))
            else:
                norm.append((r.head[0] if r.head else None, r.pos, r.naf))
        for h, pos, naf in norm:
            for a in ((h,) if h is not None else ()) + tuple(pos) + tuple(naf):
                self._id(a)
        self.rules = [(None if h is None else self.index[h], tuple(self.index[a] for a in pos),
                       tuple(self.index[a] for a in naf)) for h, pos, naf in norm]
        n = len(self.atoms)
        self.support = [[] for _ in range(n)]
        for k, (h, _, _) in enumerate(self.rules):
            if h is not None:
                self.support[h].append(k)
        self.occurs = [[] for _ in range(n)]
        for k, (h, pos, naf) in enumerate(self.rules):
            for a in set(pos) | set(naf) | ({h} if h is not None else set()):
                self.occurs[a].append(k)
        self._check_tight()
        # branch on actions before fluents, earlier time points first
        self.order = sorted(range(n), key=lambda i: self._rank(self.atoms[i]))

    @staticmethod
    def _rank(a):
        if isinstance(a, TAtom):
            return (a.time, 0 if isinstance(a.atom, AAtom) else 1, a.neg)
        return (0, 0, False)

    def _id(self, a):
        if a not in self.index:
            self.index[a] = len(self.atoms)
            self.atoms.append(a)
        return self.index[a]

    def _check_tight(self):
        """Verify the positive dependency graph is acyclic, so completion models are stable models."""
        succ = [[] for _ in self.atoms]
        for h, pos, _ in self.rules:
            if h is not None:
                for a in pos:
                    succ[a].append(h)
        color = [0] * len(self.atoms)
        for root in range(len(self.atoms)):
            if color[root]:
                continue
            stack = [(root, iter(succ[root]))]
            color[root] = 1
            while stack:
                node, it = stack[-1]
                nxt = next(it, None)
                if nxt is None:
                    color[node] = 2
                    stack.pop()
                elif color[nxt] == 1:
                    raise ValueError("program is not tight; completion search would be unsound")
                elif color[nxt] == 0:
                    color[nxt] = 1
                    stack.append((nxt, iter(succ[nxt])))

    # body status: False if some literal false, True if all true, else None
    def _body(self, val, pos, naf):
        unknown = False
        for a in pos:
            v = val[a]
            if v is False:
                return False
            if v is None:
                unknown = True
        for a in naf:
            v = val[a]
            if v is True:
                return False
            if v is None:
                unknown = True
        return None if unknown else True

    def _propagate(self, val, dirty):
        """Unit propagation over the completion; returns False on conflict."""
        rules, support = self.rules, self.support
        queue = list(dirty)
        queued_rules = set()
        while queue:
            work = []
            for a in queue:
                for k in self.occurs[a]:
                    if k not in queued_rules:
                        queued_rules.add(k)
                        work.append(k)
            heads = {rules[k][0] for k in work if rules[k][0] is not None}
            queue = []
            queued_rules.clear()
            for k in work:
                h, pos, naf = rules[k]
                b = self._body(val, pos, naf)
                hv = val[h] if h is not None else False
                if b is True:
                    if h is None or hv is False:
                        return False
                    if hv is None:
                        val[h] = True
                        queue.append(h)
                elif b is None and hv is False:
                    # body must be false: if exactly one literal is open and the rest true, falsify it
                    open_lit = None
                    count = 0
                    for a in pos:
                        if val[a] is None:
                            open_lit, count = (a, True), count + 1
                    for a in naf:
                        if val[a] is None:
                            open_lit, count = (a, False), count + 1
                    if count == 1:
                        a, positive = open_lit
                        val[a] = not positive
                        queue.append(a)
            for h in heads:
                sup = support[h]
                live = [k for k in sup if self._body(val, rules[k][1], rules[k][2]) is not False]
                if not live:
                    if val[h] is True:
                        return False
                    if val[h] is None:
                        val[h] = False
                        queue.append(h)
                elif len(live) == 1 and val[h] is True:
                    _, pos, naf = rules[live[0]]
                    for a in pos:
                        if val[a] is False:
                            return False
                        if val[a] is None:
                            val[a] = True
                            queue.append(a)
                    for a in naf:
                        if val[a] is True:
                            return False
                        if val[a] is None:
                            val[a] = False
                            queue.append(a)
        return True

    def models(self, assume: Iterable = (), limit: int | None = None, max_nodes: int = 10**6):
        """Yield stable models as frozensets of atoms; `assume` atoms are forced true."""
        n = len(self.atoms)
        val = [None] * n
        dirty = list(range(n))
        for a in assume:
            if a not in self.index:
                return
            i = self.index[a]
            val[i] = True
        # atoms with no supporting rule are false
        for i in range(n):
            if not self.support[i]:
                if val[i] is True:
                    return
                val[i] = False
        if not self._propagate(val, dirty):
            return
        found = 0
        nodes = 0
        stack = [val]
        while stack:
            val = stack.pop()
            nodes += 1
            if nodes > max_nodes:
                raise CapError(f"stable-model search exceeded {max_nodes} nodes")
            pick = next((i for i in self.order if val[i] is None), None)
            if pick is None:
                if self._is_model(val):
                    m = frozenset(self.atoms[i] for i in range(n) if val[i])
                    if not self.is_stable(m):
                        raise AssertionError("completion model is not stable")
                    yield m
                    found += 1
                    if limit is not None and found >= limit:
                        return
                continue
            for choice in (False, True):
                v2 = list(val)
                v2[pick] = choice
                if self._propagate(v2, [pick]):
                    stack.append(v2)

    def _is_model(self, val):
        for h, pos, naf in self.rules:
            b = all(val[a] for a in pos) and not any(val[a] for a in naf)
            if b and (h is None or not val[h]):
                return False
        for h in range(len(self.atoms)):
            if val[h] and not any(all(val[a] for a in self.rules[k][1]) and not any(val[a] for a in self.rules[k][2])
                                  for k in self.support[h]):
                return False
        return True

    def is_stable(self, model: frozenset) -> bool:
        """M is stable iff it satisfies the constraints and is the least model of the reduct P^M."""
        ids = {self.index[a] for a in model if a in self.index}
        if len(ids) != len(model):
            return False
        reduct = []
        for h, pos, naf in self.rules:
            if any(a in ids for a in naf):
                continue
            if h is None:
                if all(a in ids for a in pos):
                    return False
                continue
            reduct.append((h, pos))
        least = set()
        changed = True
        while changed:
            changed = False
            for h, pos in reduct:
                if h not in least and all(a in least for a in pos):
                    least.add(h)
                    changed = True
        return least == ids


def stable_models(p: AspProgram, limit: int | None = None) -> list[frozenset]:
    return list(StableModels(p.rules).models(limit=limit))


# ---------------------------------------------------------------- transition systems

@dataclass
class Ts:
    """A labelled transition system explored on demand. States must be hashable."""

    initial: tuple
    successor_fn: Callable[[Hashable], list]
    name: str = ""
    cache: dict = field(default_factory=dict)

    def successors(self, q) -> list[tuple[str, Hashable]]:
        if q not in self.cache:
            self.cache[q] = sorted(set(self.successor_fn(q)), key=repr)
        return self.cache[q]

    def explore(self, bound: int, cap: int = 10**5) -> set:
        seen = set(self.initial)
        frontier = list(self.initial)
        for _ in range(bound):
            nxt = []
            for q in frontier:
                for _, q2 in self.successors(q):
                    if q2 not in seen:
                        seen.add(q2)
                        nxt.append(q2)
                        if len(seen) > cap:
                            raise CapError(f"more than {cap} states")
            frontier = nxt
        return seen


def _freeze(d: Mapping) -> tuple:
    return tuple(sorted(d.items(), key=lambda kv: kv[0]))


def bc_state_key(prog: BcProgram, w, state) -> tuple:
    return _freeze(encode_state(prog, w, state))


def ts_bc(b: BcProgram, bound: int | None = None) -> Ts:
    """Transition system of a BC program: S_0 from P_0, edges from stable models of P_1.

    Every edge must carry exactly one action and S_0 must be a singleton; both are asserted.
    """
    p0 = StableModels(translate_asp(b, 0, with_goal=False).rules)
    inits = []
    for m in p0.models():
        inits.append(_nu(b, m, 0))
    if len(inits) != 1:
        raise AssertionError(f"expected one initial state, found {len(inits)}")
    p1 = StableModels(translate_asp(b, 1, with_goal=False, with_initial=False).rules)
    action_to_t = {a: t for t, a in b.action_of.items()}

    def succ(q):
        assume = [TAtom(FAtom(f, v), 0) for f, v in q]
        out = []
        for m in p1.models(assume):
            acts = [a.atom.action for a in m if isinstance(a.atom, AAtom) and not a.neg and a.time == 0]
            if len(acts) != 1:
                raise AssertionError(f"BC step with {len(acts)} actions")
            out.append((action_to_t[acts[0]], _nu(b, m, 1)))
        return out

    ts = Ts(tuple(inits), succ, "bc")
    if bound is not None:
        ts.explore(bound)
    return ts


def _nu(b: BcProgram, model, i) -> tuple:
    """The fluent assignment at time i of a stable model."""
    d = {}
    for a in model:
        if not a.neg and a.time == i and isinstance(a.atom, FAtom):
            if a.atom.fluent in d:
                raise AssertionError(f"fluent {a.atom.fluent} has two values at time {i}")
            d[a.atom.fluent] = a.atom.value
    if len(d) != len(b.fluents):
        raise AssertionError("stable model leaves a fluent without value")
    return _freeze(d)


def run_atoms(b: BcProgram, w, states: Sequence, transitions: Sequence[str]) -> frozenset:
    """The union over i of Phi_i for a firing sequence: the candidate stable model of P_l."""
    out = set()
    horizon = len(transitions)
    for i, s in enumerate(states):
        for f, v in encode_state(b, w, s).items():
            for u in b.domain(f):
                same = (u is v) if (u is NULL or v is NULL) else (type(u) is type(v) and u == v)
                out.add(TAtom(FAtom(f, u), i, not same))
    for i, t in enumerate(transitions):
        for a in b.actions:
            out.add(TAtom(AAtom(a), i, a != b.action_of[t]))
    assert len(states) == horizon + 1
    return frozenset(out)


def decode_run(b: BcProgram, model, horizon: int) -> tuple[list, list[str]]:
    """Phi^-: the fluent assignments and the actions of a stable model of P_l."""
    action_to_t = {a: t for t, a in b.action_of.items()}
    states = [_nu(b, model, i) for i in range(horizon + 1)]
    acts = []
    for i in range(horizon):
        here = [a.atom.action for a in model if isinstance(a.atom, AAtom) and not a.neg and a.time == i]
        if len(here) != 1:
            raise AssertionError(f"time {i}: {len(here)} actions")
        acts.append(action_to_t[here[0]])
    return states, acts


# ---------------------------------------------------------------- trace equivalence

@dataclass(frozen=True)
class EquivReport:
    equivalent: bool
    counterexample: tuple = ()
    reason: str = ""
    checked_pairs: int = 0

    def __bool__(self):
        return self.equivalent


def trace_equiv(initial, successors_left: Callable, ts: Ts, enc: Callable, max_len: int) -> EquivReport:
    """Check that paths of the left system (from `initial`) and of `ts` agree under `enc` up to max_len.

    At every synchronized pair (s, enc(s)) the labelled successor sets must
    coincide after encoding. enc must be injective on the visited left states.
    """
    starts = list(initial) if isinstance(initial, list) else [initial]
    if set(ts.initial) != {enc(s) for s in starts}:
        return EquivReport(False, (), f"initial states differ: {sorted(map(repr, ts.initial))} vs {[enc(x) for x in starts]!r}")
    seen_enc: dict = {}
    frontier = [(s, ()) for s in starts]
    visited = set(starts)
    pairs = 0
    for depth in range(max_len):
        nxt = []
        for s, path in frontier:
            q = enc(s)
            other = seen_enc.setdefault(q, s)
            if other != s:
                return EquivReport(False, path, f"encoding not injective: {other} and {s}")
            left = [(t, s2) for t, s2 in successors_left(s)]
            left_enc = {(t, enc(s2)) for t, s2 in left}
            right = set(ts.successors(q))
            pairs += 1
            if left_enc != right:
                extra_l = sorted(map(repr, left_enc - right))
                extra_r = sorted(map(repr, right - left_enc))
                return EquivReport(False, path, f"after {list(path)}: only in model {extra_l[:3]}; "
                                                f"only in encoding {extra_r[:3]}", pairs)
            for t, s2 in left:
                if s2 not in visited:
                    visited.add(s2)
                    nxt.append((s2, path + (t,)))
        frontier = nxt
    return EquivReport(True, (), "", pairs)


def rg_successors(rg):
    """Successor function over the states of a ReachGraph."""
    def succ(s):
        return [(t, rg.states[j]) for t, j in rg.successors_of(rg.index(s))]
    return succ


def ts_pddl(d, s0, bound: int | None = None) -> Ts:
    """Transition system of a state-variable domain by explicit grounding.

    Edges are labelled with the transition a template came from, so templates
    split by the classical lowering collapse onto one label.
    """
    from .encoder_pddl import apply_action, ground_actions, holds

    rigid_keys = {r: {_rel_key_pddl(t) for t in tuples} for r, tuples in d.rigid.items()}
    grounded = [(a, list(ground_actions(d, a))) for a in d.templates]

    def succ(q):
        state = dict(q)
        out = []
        for a, bindings in grounded:
            for b in bindings:
                if holds(d, a.pre, state, b, rigid_keys):
                    out.append((a.origin, _freeze(apply_action(a, state, b))))
        return out

    ts = Ts((tuple(s0),), succ, "pddl")
    if bound is not None:
        ts.explore(bound)
    return ts


def _rel_key_pddl(args):
    from .encoder_pddl import _rel_key
    return _rel_key(args)


def ts_smv(m, bound: int | None = None) -> Ts:
    """Transition system of an SMV module: initial states satisfy INIT; a state
    steps by the first rule whose pre it satisfies. Labels are the source's tr value."""
    from .encoder_smv import ENDED, LAST, TR, evaluate3, solutions

    order = list(m.vars)
    t_of = {tok: t for t, tok in m.trans_token.items()}
    t_of[LAST], t_of[ENDED] = LAST, ENDED
    inits = [_freeze(q) for q in solutions(m.init, order, {}, primed=False)]

    def succ(q):
        cur = dict(q)
        for pre, post in m.rules:
            if evaluate3(pre, cur, {}):
                return [(t_of[cur[TR]], _freeze(q2)) for q2 in solutions(post, order, cur, primed=True)]
        raise AssertionError(f"no TRANS rule applies to {q}")

    ts = Ts(tuple(inits), succ, "smv")
    if bound is not None:
        ts.explore(bound)
    return ts
