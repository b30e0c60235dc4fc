"""Seeded random DAW-nets, guards and traces for property tests and oracle comparisons."""

from __future__ import annotations

import random

from .core_net import PetriNet, check_bounded, check_wf
from .data_model import DataModel
from .guard_lang import TRUE, And, Const, Def, Eq, GuardExpr, Leq, Not, Var
from .model import DawNet, choices, enabled, fire_data
from .trace import Event, Trace


# ---------------------------------------------------------------- control flow

def structured_net(rng: random.Random, max_places: int = 6, max_transitions: int = 4) -> PetriNet:
    """A safe WF-net grown from source -> t -> sink by sequence, choice, parallel and loop refinements."""
    places = ["start", "end"]
    trans = ["t0"]
    arcs = {("start", "t0"), ("t0", "end")}

    def fresh_p():
        p = f"p{len(places) - 1}"
        places.append(p)
        return p

    def fresh_t():
        t = f"t{len(trans)}"
        trans.append(t)
        return t

    want_p, want_t = rng.randint(2, max_places), rng.randint(1, max_transitions)
    for _ in range(30):
        if len(places) >= want_p and len(trans) >= want_t:
            break
        t = rng.choice(trans)
        pre = sorted(a for a, b in arcs if b == t)
        post = sorted(b for a, b in arcs if a == t)
        op = rng.choice(["seq", "xor", "and", "loop"])
        room_p, room_t = max_places - len(places), max_transitions - len(trans)
        if op == "seq" and room_p >= 1 and room_t >= 1:
            p, t2 = fresh_p(), fresh_t()
            for q in post:
                arcs.discard((t, q))
                arcs.add((t2, q))
            arcs |= {(t, p), (p, t2)}
        elif op == "xor" and room_t >= 1:
            t2 = fresh_t()
            arcs |= {(q, t2) for q in pre} | {(t2, q) for q in post}
        elif op == "and" and room_p >= 2 and room_t >= 1 and len(post) == 1:
            # t forks into two branches that a new transition joins
            p1, p2, tj = fresh_p(), fresh_p(), fresh_t()
            arcs.discard((t, post[0]))
            arcs |= {(t, p1), (t, p2), (p1, tj), (p2, tj), (tj, post[0])}
        elif op == "loop" and room_t >= 1 and len(pre) == 1 and len(post) == 1 \
                and pre[0] != "start" and post[0] != "end":
            t2 = fresh_t()
            arcs |= {(post[0], t2), (t2, pre[0])}
    return PetriNet.build(places, trans, arcs)


def random_flow_net(rng: random.Random, max_places: int = 6, max_transitions: int = 4,
                    tries: int = 200) -> PetriNet | None:
    """An unstructured net with random arcs, kept only if it is a WF-net and 1-safe."""
    for _ in range(tries):
        n_p = rng.randint(min(3, max_places), max_places)
        n_t = rng.randint(1, max_transitions)
        places = ["start"] + [f"p{i}" for i in range(1, n_p - 1)] + ["end"]
        trans = [f"t{i}" for i in range(n_t)]
        arcs = set()
        for t in trans:
            for p in rng.sample(places[:-1], rng.randint(1, min(2, n_p - 1))):
                arcs.add((p, t))
            for p in rng.sample(places[1:], rng.randint(1, min(2, n_p - 1))):
                arcs.add((t, p))
        net = PetriNet.build(places, trans, arcs)
        if not check_wf(net).is_wf:
            continue
        if not check_bounded(net, 1, max_states=5000).bounded:
            continue
        return net
    return None


# ---------------------------------------------------------------- data

def random_data(rng: random.Random, max_vars: int = 2, max_domain: int = 3) -> DataModel:
    domains, orders = {}, {}
    for i in range(rng.randint(0, max_vars)):
        v = f"x{i}"
        k = rng.randint(1, max_domain)
        if rng.random() < 0.7:
            domains[v] = tuple(rng.sample(range(4), k))
        else:
            vals = rng.sample(["a", "b", "c"], k)
            domains[v] = tuple(vals)
            if k > 1 and rng.random() < 0.5:
                vals = sorted(vals)
                orders[v] = tuple(zip(vals, vals[1:]))
    return DataModel.create(domains, orders)


def random_guard(rng: random.Random, data: DataModel, depth: int = 2) -> GuardExpr:
    """Random guard over data's variables and domain constants."""
    vs = list(data.variables)
    if not vs:
        return TRUE if rng.random() < 0.7 else Not(TRUE)

    def term(v=None):
        v = v or rng.choice(vs)
        return Var(v)

    def const(v):
        return Const(rng.choice(data.domain(v)))

    def atom():
        v = rng.choice(vs)
        kind = rng.random()
        if kind < 0.15:
            return TRUE
        if kind < 0.35:
            return Def(v)
        if kind < 0.6:
            return Eq(Var(v), const(v))
        if kind < 0.7:
            return Eq(Var(v), Var(rng.choice(vs)))
        if kind < 0.8:
            return Leq(Var(v), const(v))
        if kind < 0.9:
            return Leq(const(v), Var(v))
        return Leq(Var(v), Var(rng.choice(vs)))

    def gen(d):
        r = rng.random()
        if d == 0 or r < 0.4:
            return atom()
        if r < 0.65:
            return Not(gen(d - 1))
        return And(gen(d - 1), gen(d - 1))

    return gen(depth)


def _can_terminate(net: PetriNet) -> bool:
    from .solver import solve
    return bool(solve(DawNet(net, DataModel.create({}), {}, {}), max_states=5000).reachable)


def random_dawnet(rng: random.Random, max_places: int = 6, max_transitions: int = 4, max_vars: int = 2,
                  max_domain: int = 3, name: str = "random") -> DawNet:
    """A random safe DAW-net: structured or random-flow control, random writes, deletes and guards.

    Nets whose guards block every firing from the initial state are mostly
    redrawn: they make poor test cases, but a few are kept for the corner.
    """
    net = None
    if rng.random() < 0.35:
        net = random_flow_net(rng, max_places, max_transitions)
        if net is not None and not _can_terminate(net):
            net = None
    while net is None:
        net = structured_net(rng, max_places, max_transitions)
        if not check_bounded(net, 1, max_states=5000).bounded:
            net = None
    data = random_data(rng, max_vars, max_domain)
    keep_dead = rng.random() < 0.1
    for _ in range(6):
        writes, guards = {}, {}
        for t in net.transitions:
            spec = {}
            for v in data.variables:
                r = rng.random()
                if r < 0.45:
                    dom = data.domain(v)
                    spec[v] = tuple(rng.sample(dom, rng.randint(1, len(dom))))
                elif r < 0.55:
                    spec[v] = ()
            writes[t] = spec
            if rng.random() < 0.45:
                guards[t] = random_guard(rng, data, rng.randint(0, 2))
        w = DawNet(net, data, writes, guards, name=name)
        if keep_dead or enabled(w, w.initial_state()):
            break
    return w


def random_suite(seed: int, count: int, **kw) -> list[DawNet]:
    rng = random.Random(seed)
    return [random_dawnet(rng, name=f"random{i}", **kw) for i in range(count)]


# ---------------------------------------------------------------- traces

def random_walk(w: DawNet, rng: random.Random, max_steps: int = 12):
    """A random firing sequence [(transition, choice, state)]; stops at dead ends or max_steps."""
    s = w.initial_state()
    out = []
    for _ in range(max_steps):
        if w.is_final(s):
            break
        opts = [(t, ch) for t in enabled(w, s) for ch in choices(w, t)]
        if not opts:
            break
        t, ch = rng.choice(opts)
        s = fire_data(w, s, t, ch)
        out.append((t, ch, s))
    return out


def trace_of_run(w: DawNet, run, rng: random.Random, keep: float = 0.6, observe: float = 0.7) -> Trace:
    """Drop events and data from a run: each kept event reports a random part of what its firing did."""
    events = []
    for t, ch, s in run:
        if rng.random() >= keep:
            continue
        written = {v: x for v, x in ch.items() if rng.random() < observe}
        deleted = [v for v in w.deleted(t) if rng.random() < observe]
        events.append(Event(t, written, frozenset(deleted)))
    return Trace(tuple(events))


def random_trace(w: DawNet, rng: random.Random, max_len: int = 4) -> Trace:
    """Events drawn independently: usually not compliant, always sane."""
    events = []
    for _ in range(rng.randint(0, max_len)):
        t = rng.choice(w.transitions)
        written, deleted = {}, set()
        for v, vals in w.writes[t].items():
            r = rng.random()
            if vals and r < 0.5:
                written[v] = rng.choice(vals)
            elif not vals and r < 0.5:
                deleted.add(v)
        for v in w.variables:
            if v not in w.writes[t] and rng.random() < 0.15:
                if rng.random() < 0.5:
                    written[v] = rng.choice(w.data.domain(v))
                else:
                    deleted.add(v)
        events.append(Event(t, written, frozenset(deleted)))
    return Trace(tuple(events))


def random_net_trace_pairs(seed: int, count: int, **kw) -> list[tuple[DawNet, Trace]]:
    """Half the traces come from runs (compliant when the run is a case), half are random."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        w = random_dawnet(rng, name=f"random{i}", **kw)
        if rng.random() < 0.5:
            tau = trace_of_run(w, random_walk(w, rng), rng)
        else:
            tau = random_trace(w, rng)
        out.append((w, tau))
    return out
