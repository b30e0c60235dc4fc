"""Traces, compliance, and trace completion through the trace workflow.

A trace is injected into a net as a chain of copies of the observed
transitions, each pinned to the observed data. Cases of the resulting net
that reach the final marking project onto exactly the cases of the original
net the trace is compliant with.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .core_net import Marking, PetriNet
from .data_model import Value, format_value, same_value
from .guard_lang import TRUE, Const, Def, Eq, Not, Var, conj
from .model import DawNet, State
from .solver import ReachResult, Step, solve

START_T = "start_t"
END_T = "end_t"


class TraceError(ValueError):
    pass


class EventSanityViolation(TraceError):
    def __init__(self, index, var, why):
        self.index, self.var = index, var
        super().__init__(f"event {index}: {var}: {why}")


@dataclass(frozen=True)
class Event:
    """An observed firing of `transition`; `written` holds observed values, `deleted` unassigned variables."""

    transition: str
    written: Mapping[str, Value] = field(default_factory=dict)
    deleted: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "written", dict(sorted(dict(self.written).items())))
        object.__setattr__(self, "deleted", frozenset(self.deleted))
        both = set(self.written) & self.deleted
        if both:
            raise TraceError(f"event {self.transition}: {sorted(both)} both observed and deleted")

    def __hash__(self):
        return hash((self.transition, tuple(self.written), self.deleted))

    def __str__(self):
        parts = [f"{k}={format_value(v)}" for k, v in self.written.items()]
        parts += [f"-{k}" for k in sorted(self.deleted)]
        return self.transition + (f"[{', '.join(parts)}]" if parts else "")


@dataclass(frozen=True)
class Trace:
    events: tuple[Event, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def __getitem__(self, i):
        return self.events[i]

    def __str__(self):
        return "<" + ", ".join(map(str, self.events)) + ">"

    @classmethod
    def of(cls, *items) -> "Trace":
        """Trace.of("T3", ("T7", {"request": 60000})) builds events from names or (name, data) pairs."""
        evs = []
        for it in items:
            if isinstance(it, Event):
                evs.append(it)
            elif isinstance(it, str):
                evs.append(Event(it))
            else:
                evs.append(Event(*it))
        return cls(tuple(evs))


# ---------------------------------------------------------------- normalization

def _fresh(base: str, taken: set) -> str:
    name = base
    i = 1
    while name in taken:
        name = f"{base}_{i}"
        i += 1
    taken.add(name)
    return name


def is_normalized(w: DawNet) -> bool:
    """True when the source feeds only start_t and the sink is fed only by end_t, both plain."""
    net = w.net
    if START_T not in net.transitions or END_T not in net.transitions:
        return False
    ok_start = net.postset(w.source) == {START_T} and net.preset(START_T) == {w.source} and len(net.postset(START_T)) == 1
    ok_end = net.preset(w.sink) == {END_T} and net.postset(END_T) == {w.sink} and len(net.preset(END_T)) == 1
    plain = all(w.guards[t] == TRUE and not w.writes[t] for t in (START_T, END_T))
    return ok_start and ok_end and plain


def normalize_endpoints(w: DawNet) -> DawNet:
    """Wrap w as new source -> start_t -> old source ... old sink -> end_t -> new sink (idempotent)."""
    if is_normalized(w):
        return w
    taken = set(w.net.nodes())
    if START_T in taken or END_T in taken:
        raise TraceError("net uses start_t/end_t without being in normal form")
    new_src = _fresh("i_" + w.source, taken)
    new_sink = _fresh("o_" + w.sink, taken)
    arcs = set(w.net.flow) | {(new_src, START_T), (START_T, w.source), (w.sink, END_T), (END_T, new_sink)}
    net = PetriNet.build(w.places + (new_src, new_sink), w.transitions + (START_T, END_T), arcs)
    return w.replace(net=net)


# ---------------------------------------------------------------- injection

@dataclass(frozen=True)
class TraceWorkflow:
    net: DawNet                                   # W^tau
    base: DawNet                                  # the normalized W it was built from
    trace: Trace
    event_transition_of: Mapping[int, str]        # event index (0-based) -> t_{e_i}
    event_place_of: Mapping[int, str]             # 0..n -> p_{e_i}
    projection: Mapping[str, str | None]          # node of W^tau -> node of W (None for new places)


def check_event(w: DawNet, i: int, e: Event) -> None:
    if e.transition not in w.transitions:
        raise EventSanityViolation(i, e.transition, "unknown transition")
    if e.transition in (START_T, END_T) and is_normalized(w):
        raise EventSanityViolation(i, e.transition, "events may not refer to start_t/end_t")
    wr = w.writes[e.transition]
    for v, x in e.written.items():
        if v not in w.data.domains:
            raise EventSanityViolation(i, v, "unknown variable")
        if not w.data.contains(v, x):
            raise EventSanityViolation(i, v, f"{format_value(x)} is outside the domain")
        if v in wr:
            if not wr[v]:
                raise EventSanityViolation(i, v, "observed a value for a variable the transition deletes")
            if not any(same_value(x, y) for y in wr[v]):
                raise EventSanityViolation(i, v, f"{format_value(x)} is not a value {e.transition} can write")
    for v in e.deleted:
        if v not in w.data.domains:
            raise EventSanityViolation(i, v, "unknown variable")
        if v in wr and wr[v]:
            raise EventSanityViolation(i, v, "observed as deleted but the transition writes it")


def inject(w: DawNet, tau: Trace) -> TraceWorkflow:
    """Build the trace workflow W^tau of (the normalized) w."""
    w = normalize_endpoints(w)
    for i, e in enumerate(tau):
        check_event(w, i, e)
    taken = set(w.net.nodes())
    n = len(tau)
    place_of = {i: _fresh(f"pe{i}", taken) for i in range(n + 1)}
    trans_of = {i: _fresh(f"e{i + 1}_{e.transition}", taken) for i, e in enumerate(tau)}
    arcs = set(w.net.flow)
    arcs.add((START_T, place_of[0]))
    arcs.add((place_of[n], END_T))
    writes = dict(w.writes)
    guards = dict(w.guards)
    projection = {x: x for x in w.net.nodes()}
    for i, e in enumerate(tau):
        t, te = e.transition, trans_of[i]
        projection[te] = t
        arcs |= {(p, te) for p in w.net.preset(t)}
        arcs |= {(te, p) for p in w.net.postset(t)}
        arcs |= {(place_of[i], te), (te, place_of[i + 1])}
        wr = w.writes[t]
        writes[te] = {v: ((e.written[v],) if v in e.written else vals) for v, vals in wr.items()}
        extra = [Eq(Var(v), Const(x)) for v, x in e.written.items() if v not in wr]
        extra += [Not(Def(v)) for v in sorted(e.deleted) if v not in wr]
        guards[te] = conj([w.guards[t]] + extra) if extra else w.guards[t]
    for p in place_of.values():
        projection[p] = None
    net = PetriNet.build(w.places + tuple(place_of.values()), w.transitions + tuple(trans_of.values()), arcs)
    wt = DawNet(net, w.data, writes, guards, name=f"{w.name}_trace")
    return TraceWorkflow(wt, w, tau, trans_of, place_of, projection)


def _restrict_state(s: State, net: PetriNet) -> State:
    return State(Marking(net.places, (s.marking[p] for p in net.places)), s.eta)


def project(tw: TraceWorkflow, case: Sequence[Step]) -> list[Step]:
    """Map a case of W^tau to one of the normalized W: t_{e_i} -> t_i, new places dropped."""
    return [Step(tw.projection[s.transition], s.choice, _restrict_state(s.state, tw.base.net)) for s in case]


# ---------------------------------------------------------------- compliance

def _event_matches(w: DawNet, e: Event, step: Step) -> bool:
    if e.transition != step.transition:
        return False
    eta = step.state.eta
    for v, x in e.written.items():
        if v not in eta or not same_value(eta[v], x):
            return False
    return not any(v in eta for v in e.deleted)


def check_compliance(w: DawNet, case: Sequence[Step], tau: Trace) -> dict[int, int] | None:
    """An order-preserving injective map event index -> case position (both 0-based), or None.

    Positions index the firings of `case`; each step carries the state after firing.
    """
    n, m = len(tau), len(case)
    ok = [[_event_matches(w, tau[i], case[j]) for j in range(m)] for i in range(n)]
    gamma: dict[int, int] = {}

    def search(i, j):
        if i == n:
            return True
        for k in range(j, m - (n - i - 1)):
            if ok[i][k]:
                gamma[i] = k
                if search(i + 1, k + 1):
                    return True
        gamma.pop(i, None)
        return False

    return dict(gamma) if search(0, 0) else None


# ---------------------------------------------------------------- completion

@dataclass(frozen=True)
class Completion:
    result: ReachResult               # search over W^tau
    workflow: TraceWorkflow
    case: tuple[Step, ...] | None     # completed case of the original net
    observed: tuple[bool, ...] = ()   # per step of `case`: does it realize a trace event
    initial: State | None = None

    @property
    def reachable(self):
        return self.result.reachable


def complete(w: DawNet, tau: Trace, max_states: int = 10**6, max_depth: int | None = None) -> Completion:
    """Search W^tau for clean termination and project the witness back onto w."""
    wn = normalize_endpoints(w)
    added = wn is not w
    tw = inject(wn, tau)
    res = solve(tw.net, None, max_states=max_states, max_depth=max_depth)
    if not res.reachable:
        return Completion(res, tw, None, (), w.initial_state())
    event_ts = set(tw.event_transition_of.values())
    steps = project(tw, res.witness)
    flags = [s.transition in event_ts for s in res.witness]
    if added:
        keep = [k for k, s in enumerate(steps) if s.transition not in (START_T, END_T)]
        steps = [Step(steps[k].transition, steps[k].choice, _restrict_state(steps[k].state, w.net)) for k in keep]
        flags = [flags[k] for k in keep]
    return Completion(res, tw, tuple(steps), tuple(flags), w.initial_state())


def sample_cases(w: DawNet, max_len: int, budget: int = 10**5):
    """All cases (firing sequences ending in the final marking) of length <= max_len, by DFS.

    Yields lists of Step. Raises BudgetExceeded past `budget` visited prefixes.
    """
    from .model import choices, enabled, fire_data
    from .solver import BudgetExceeded

    final = w.final_marking()
    count = 0
    path: list[Step] = []

    def dfs(s):
        nonlocal count
        count += 1
        if count > budget:
            raise BudgetExceeded(f"more than {budget} prefixes")
        if s.marking == final:
            yield list(path)
        if len(path) == max_len:
            return
        for t in enabled(w, s):
            for ch in choices(w, t):
                s2 = fire_data(w, s, t, ch)
                path.append(Step(t, ch, s2))
                yield from dfs(s2)
                path.pop()

    yield from dfs(w.initial_state())


def lift_case(tw: TraceWorkflow, case: Sequence[Step], gamma: Mapping[int, int]) -> list[Step]:
    """Rename the firings chosen by gamma to their event copies: a candidate case of W^tau."""
    inv = {j: i for i, j in gamma.items()}
    out = []
    for j, s in enumerate(case):
        t = tw.event_transition_of[inv[j]] if j in inv else s.transition
        out.append(Step(t, s.choice, s.state))
    return out
