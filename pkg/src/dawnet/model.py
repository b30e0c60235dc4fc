"""DAW-nets: WF-nets with data, guarded transitions and write specifications.

The reference operations (`enabled`, `fire_data`, `successors`) follow the
firing definition literally on Marking/Assignment objects. `Engine` is the
compiled form used by the state-space search: markings as bit masks,
assignments as tuples with None for unassigned variables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

from . import core_net
from .core_net import Marking, PetriNet, check_wf
from .data_model import (Assignment, DataModel, UnknownVariable, Value, ValueOutsideDomain,
                         format_value, same_value, sort_values)
from .guard_lang import (TRUE, GuardExpr, active_domain, check_guard, compile_guard, evaluate,
                         to_text)


class ModelError(ValueError):
    pass


class GuardFailed(Exception):
    def __init__(self, transition, guard):
        self.transition, self.guard = transition, guard
        super().__init__(f"guard of {transition} is false: {to_text(guard)}")


class BadChoice(ValueError):
    def __init__(self, transition, var, why):
        self.transition, self.var = transition, var
        super().__init__(f"bad write choice for {transition}.{var}: {why}")


class UnsafeMarking(Exception):
    """A firing would put a second token in a place of a net assumed safe."""

    def __init__(self, transition, places, state=None):
        self.transition, self.places, self.state = transition, tuple(places), state
        super().__init__(f"firing {transition} puts a second token in {', '.join(self.places)}")


class CapExceeded(Exception):
    def __init__(self, what, limit, graph=None):
        self.what, self.limit, self.graph = what, limit, graph
        super().__init__(f"{what} cap of {limit} exceeded")


@dataclass(frozen=True)
class DawNet:
    """A WF-net with a data model, write specs `writes[t][v]` (empty = delete) and guards."""

    net: PetriNet
    data: DataModel
    writes: Mapping[str, Mapping[str, tuple[Value, ...]]]
    guards: Mapping[str, GuardExpr]
    name: str = "net"
    _info: dict = field(default=None, repr=False, compare=False, hash=False)

    def __post_init__(self):
        chk = check_wf(self.net)
        if not chk.is_wf:
            raise ModelError(f"not a WF-net: sources={list(chk.sources)} sinks={list(chk.sinks)} "
                             f"off-path={chk.unreachable_nodes}")
        writes = {}
        for t in self.net.transitions:
            spec = dict(self.writes.get(t, {}))
            clean = {}
            for v in sorted(spec):
                if v not in self.data.domains:
                    raise UnknownVariable(v)
                vals = sort_values(spec[v])
                for x in vals:
                    if not self.data.contains(v, x):
                        raise ValueOutsideDomain(v, x)
                clean[v] = vals
            writes[t] = clean
        unknown = set(self.writes) - set(self.net.transitions)
        unknown |= set(self.guards) - set(self.net.transitions)
        if unknown:
            raise ModelError(f"writes/guards given for unknown transitions: {sorted(unknown)}")
        guards = {t: self.guards.get(t, TRUE) for t in self.net.transitions}
        for t, g in guards.items():
            check_guard(g, self.data)
        object.__setattr__(self, "writes", writes)
        object.__setattr__(self, "guards", guards)
        object.__setattr__(self, "_info", {"source": chk.source, "sink": chk.sink})

    @property
    def source(self) -> str:
        return self._info["source"]

    @property
    def sink(self) -> str:
        return self._info["sink"]

    @property
    def places(self) -> tuple[str, ...]:
        return self.net.places

    @property
    def transitions(self) -> tuple[str, ...]:
        return self.net.transitions

    @property
    def variables(self) -> tuple[str, ...]:
        return self.data.variables

    def written(self, t: str) -> tuple[str, ...]:
        """WR: variables t assigns a value to."""
        return tuple(v for v, vals in self.writes[t].items() if vals)

    def deleted(self, t: str) -> tuple[str, ...]:
        """DEL: variables t makes undefined."""
        return tuple(v for v, vals in self.writes[t].items() if not vals)

    def value_range(self, var: str) -> tuple[Value, ...]:
        """Values var can ever hold: the union of all write sets for it."""
        if var not in self.data.domains:
            raise UnknownVariable(var)
        return sort_values(x for t in self.transitions for x in self.writes[t].get(var, ()))

    def initial_state(self) -> "State":
        return State(Marking.of(self.net, [self.source]), Assignment())

    def final_marking(self) -> Marking:
        return Marking.of(self.net, [self.sink])

    def is_final(self, s: "State") -> bool:
        return s.marking == self.final_marking()

    def replace(self, **kw) -> "DawNet":
        args = dict(net=self.net, data=self.data, writes=self.writes, guards=self.guards, name=self.name)
        args.update(kw)
        return DawNet(**args)


@dataclass(frozen=True)
class State:
    marking: Marking
    eta: Assignment

    def __repr__(self):
        data = ", ".join(f"{k}={format_value(v)}" for k, v in self.eta.items_sorted())
        return f"State([{', '.join(self.marking.support())}] {{{data}}})"


def model_constants(w: DawNet) -> tuple[Value, ...]:
    """adm(W): every constant in a write set or a guard."""
    vals = [x for t in w.transitions for vs in w.writes[t].values() for x in vs]
    for g in w.guards.values():
        vals.extend(active_domain(g))
    return sort_values(vals)


def restrict_finite(w: DawNet) -> DawNet:
    """The finite version of w: every domain cut to the model's constants."""
    adm = model_constants(w)
    data = w.data.restrict({v: adm for v in w.variables})
    return w.replace(data=data)


# ---------------------------------------------------------------- reference firing

def enabled(w: DawNet, s: State) -> list[str]:
    out = []
    for t in w.transitions:
        if core_net.is_enabled(w.net, s.marking, t) and evaluate(w.guards[t], w.data, s.eta):
            out.append(t)
    return out


def fire_data(w: DawNet, s: State, t: str, choice: Mapping[str, Value] | None = None) -> State:
    """Valid firing of t with the given values for the written variables."""
    choice = dict(choice or {})
    m2 = core_net.fire(w.net, s.marking, t)
    if not evaluate(w.guards[t], w.data, s.eta):
        raise GuardFailed(t, w.guards[t])
    wr = w.writes[t]
    for v in w.written(t):
        if v not in choice:
            raise BadChoice(t, v, "no value chosen")
        if not any(same_value(choice[v], x) for x in wr[v]):
            raise BadChoice(t, v, f"{format_value(choice[v])} not in the write set")
    for v in choice:
        if v not in wr or not wr[v]:
            raise BadChoice(t, v, "variable is not written by the transition")
    eta = {k: x for k, x in s.eta.items() if not (k in wr and not wr[k])}
    eta.update(choice)
    return State(m2, Assignment(eta))


def choices(w: DawNet, t: str) -> list[dict[str, Value]]:
    """All write choices of t: product of the write sets, variables and values in canonical order."""
    wr_vars = w.written(t)
    return [dict(zip(wr_vars, combo)) for combo in itertools.product(*(w.writes[t][v] for v in wr_vars))]


def successors(w: DawNet, s: State) -> list[tuple[str, State]]:
    out = []
    for t in enabled(w, s):
        for ch in choices(w, t):
            out.append((t, fire_data(w, s, t, ch)))
    return out


# ---------------------------------------------------------------- compiled engine

class Engine:
    """Bit-mask form of a safe DAW-net for fast exploration."""

    def __init__(self, w: DawNet):
        self.w = w
        self.places = w.places
        self.pidx = {p: i for i, p in enumerate(self.places)}
        self.vars = w.variables
        self.vidx = {v: i for i, v in enumerate(self.vars)}
        self.trans = w.transitions
        self.rules = []
        for t in self.trans:
            pre = w.net.preset(t)
            post = w.net.postset(t)
            pre_mask = self._mask(pre)
            consume = self._mask(pre - post)
            produce = self._mask(post - pre)
            guard = compile_guard(w.guards[t], w.data, self.vidx)
            wr_vars = w.written(t)
            dels = [self.vidx[v] for v in w.deleted(t)]
            options = []
            for combo in itertools.product(*(w.writes[t][v] for v in wr_vars)):
                options.append(tuple((self.vidx[v], x) for v, x in zip(wr_vars, combo))
                               + tuple((i, None) for i in dels))
            self.rules.append((t, pre_mask, consume, produce, guard, options, wr_vars))
        self.initial = (1 << self.pidx[w.source], (None,) * len(self.vars))
        self.final_mask = 1 << self.pidx[w.sink]

    def _mask(self, places) -> int:
        m = 0
        for p in places:
            m |= 1 << self.pidx[p]
        return m

    def expand(self, key):
        """Yield (rule index, option index, successor key) in canonical order."""
        m, eta = key
        for ri, (t, pre, consume, produce, guard, options, _) in enumerate(self.rules):
            if m & pre != pre or not guard(eta):
                continue
            m2 = m & ~consume
            if m2 & produce:
                clash = [p for p in self.places if (m2 & produce) >> self.pidx[p] & 1]
                raise UnsafeMarking(t, clash, self.state(key))
            m2 |= produce
            for oi, opt in enumerate(options):
                if opt:
                    e2 = list(eta)
                    for i, x in opt:
                        e2[i] = x
                    yield ri, oi, (m2, tuple(e2))
                else:
                    yield ri, oi, (m2, eta)

    def state(self, key) -> State:
        m, eta = key
        marking = Marking(self.places, ((m >> i) & 1 for i in range(len(self.places))))
        return State(marking, Assignment((v, x) for v, x in zip(self.vars, eta) if x is not None))

    def key(self, s: State):
        if not s.marking.is_safe():
            raise UnsafeMarking("?", [p for p in s.marking if s.marking[p] > 1], s)
        m = 0
        for p in s.marking.support():
            m |= 1 << self.pidx[p]
        return (m, tuple(s.eta.get(v) for v in self.vars))

    def choice(self, ri, oi) -> dict[str, Value]:
        t, _, _, _, _, options, wr_vars = self.rules[ri]
        return {self.vars[i]: x for i, x in options[oi] if x is not None}


# ---------------------------------------------------------------- reachability graph

@dataclass(frozen=True)
class ReachGraph:
    states: tuple[State, ...]
    edges: tuple[tuple[int, str, int], ...]
    initial: int = 0
    truncated: bool = False

    def successors_of(self, i: int) -> list[tuple[str, int]]:
        if not hasattr(self, "_succ"):
            succ = {}
            for a, t, b in self.edges:
                succ.setdefault(a, []).append((t, b))
            object.__setattr__(self, "_succ", succ)
        return self._succ.get(i, [])

    def index(self, s: State) -> int:
        if not hasattr(self, "_index"):
            object.__setattr__(self, "_index", {x: i for i, x in enumerate(self.states)})
        return self._index[s]


def build_rg(w: DawNet, max_states: int = 10**6, max_depth: int | None = None) -> ReachGraph:
    """BFS closure from the initial state, deduplicating states.

    Stops expanding at `max_depth` (graph flagged truncated). Raises CapExceeded,
    carrying the partial graph, when more than `max_states` states are found.
    Raises UnsafeMarking if a firing would put two tokens in a place.
    """
    eng = Engine(w)
    index = {eng.initial: 0}
    keys = [eng.initial]
    edges = []
    frontier = [eng.initial]
    depth = 0
    truncated = False
    while frontier:
        if max_depth is not None and depth >= max_depth:
            truncated = any(True for k in frontier for _ in eng.expand(k))
            break
        nxt = []
        for k in frontier:
            src = index[k]
            seen_edges = set()
            for ri, _, k2 in eng.expand(k):
                dst = index.get(k2)
                if dst is None:
                    dst = index[k2] = len(keys)
                    keys.append(k2)
                    nxt.append(k2)
                    if len(keys) > max_states:
                        graph = ReachGraph(tuple(eng.state(x) for x in keys), tuple(edges), 0, True)
                        raise CapExceeded("state", max_states, graph)
                edge = (src, eng.trans[ri], dst)
                if edge not in seen_edges:
                    seen_edges.add(edge)
                    edges.append(edge)
        frontier = nxt
        depth += 1
    return ReachGraph(tuple(eng.state(k) for k in keys), tuple(edges), 0, truncated)
