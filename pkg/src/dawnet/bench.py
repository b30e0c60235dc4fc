"""Synthetic benchmark: the core net K, its compositions M1..M5, and eight trace archetypes.

K starts with A, which writes first, second, third and fourth. A choice
(B, D or C, E) leads to a parallel block: G writes fifth, H is silent and I
writes number, looping back through L while number is not 5. M joins once
number is 5, and one of N, O, P is taken depending on first = 1, second = 2,
third = 3. R, S, T and U close the net.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

from .core_net import PetriNet
from .data_model import DataModel
from .guard_lang import Const, Eq, Not, Var
from .model import DawNet
from .trace import Event, Trace, complete

MODELS = ("M1", "M2", "M3", "M4", "M5")
TRACE_TYPES = ("T1", "T2", "T3", "T4", "T5", "T6", "T7", "T8")
LEVELS = (100, 75, 50, 25, 0)
COMPLIANT = {"T1", "T2", "T3", "T4"}

_K_ARCS = [
    ("in", "A"), ("A", "p1"),
    ("p1", "B"), ("B", "p2"), ("p1", "C"), ("C", "p3"),
    ("p2", "D"), ("D", "p4"), ("p3", "E"), ("E", "p4"),
    ("p4", "F"), ("F", "p5"), ("F", "p6"), ("F", "p7"),
    ("p5", "G"), ("G", "p8"), ("p6", "H"), ("H", "p9"), ("p7", "I"), ("I", "p10"),
    ("p10", "L"), ("L", "p7"),
    ("p8", "M"), ("p9", "M"), ("p10", "M"), ("M", "p11"),
    ("p11", "N"), ("N", "p12"), ("p11", "O"), ("O", "p13"), ("p11", "P"), ("P", "p14"),
    ("p12", "R"), ("R", "p15"), ("p13", "S"), ("S", "p15"), ("p14", "T"), ("T", "p15"),
    ("p15", "U"), ("U", "out"),
]
_K_DOMAINS = {"first": (0, 1), "second": (0, 2), "third": (0, 3), "fourth": (4,), "fifth": (5,),
              "number": (0, 5)}
_K_WRITES = {"A": {"first": (0, 1), "second": (0, 2), "third": (0, 3), "fourth": (4,)},
             "G": {"fifth": (5,)}, "I": {"number": (0, 5)}}
_K_GUARDS = {"L": ("number", 5, True), "M": ("number", 5, False),
             "N": ("first", 1, False), "O": ("second", 2, False), "P": ("third", 3, False)}


@dataclass(frozen=True)
class BenchSpec:
    model: str
    trace_type: str
    completeness: int

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}")
        if self.trace_type not in TRACE_TYPES:
            raise ValueError(f"trace type must be one of {TRACE_TYPES}")
        if self.completeness not in LEVELS:
            raise ValueError(f"completeness must be one of {LEVELS}")

    @property
    def compliant(self) -> bool:
        """Ground truth. The empty trace is compliant with every model that has a case."""
        return self.trace_type in COMPLIANT or self.completeness == 0

    def label(self) -> str:
        return f"{self.model}-{self.trace_type}-{self.completeness}"


def all_specs() -> list[BenchSpec]:
    return [BenchSpec(m, t, c) for m in MODELS for t in TRACE_TYPES for c in LEVELS]


# ---------------------------------------------------------------- models

class _Builder:
    def __init__(self):
        self.places, self.trans, self.arcs = set(), set(), set()
        self.domains, self.writes, self.guards = {}, {}, {}

    def replica(self, prefix: str, entry: str, exit_: str):
        def nm(x):
            if x == "in":
                return entry
            if x == "out":
                return exit_
            return prefix + x
        for a, b in _K_ARCS:
            self.arcs.add((nm(a), nm(b)))
            for x in (a, b):
                (self.trans if x[0].isupper() else self.places).add(nm(x))
        for v, dom in _K_DOMAINS.items():
            self.domains[prefix + v] = dom
        for t, spec in _K_WRITES.items():
            self.writes[prefix + t] = {prefix + v: vals for v, vals in spec.items()}
        for t, (v, c, neg) in _K_GUARDS.items():
            g = Eq(Var(prefix + v), Const(c))
            self.guards[prefix + t] = Not(g) if neg else g

    def silent(self, name: str, pre, post):
        self.trans.add(name)
        self.arcs |= {(p, name) for p in pre} | {(name, p) for p in post}
        self.places |= set(pre) | set(post)

    def build(self, name: str) -> DawNet:
        net = PetriNet.build(sorted(self.places), sorted(self.trans), self.arcs)
        return DawNet(net, DataModel.create(self.domains), self.writes, self.guards, name=name)


def replica_prefixes(model: str) -> list[str]:
    return {"M1": [""], "M2": ["K0_", "K1_"], "M3": ["K0_", "K1_"], "M4": ["K0_", "K1_", "K2_"],
            "M5": ["K0_", "K1_", "K2_"]}[model]


def build_model(model: str) -> DawNet:
    b = _Builder()
    if model == "M1":
        b.replica("", "start", "end")
    elif model == "M2":
        b.replica("K0_", "start", "m0")
        b.replica("K1_", "m0", "end")
    elif model == "M3":
        b.silent("split", ["start"], ["K0_start", "K1_start"])
        b.replica("K0_", "K0_start", "K0_end")
        b.replica("K1_", "K1_start", "K1_end")
        b.silent("join", ["K0_end", "K1_end"], ["end"])
    elif model == "M4":
        b.replica("K0_", "start", "m0")
        b.replica("K1_", "m0", "m1")
        b.replica("K2_", "m1", "end")
    elif model == "M5":
        b.replica("K0_", "start", "m0")
        b.replica("K1_", "m0", "end")
        b.replica("K2_", "start", "end")
    else:
        raise ValueError(f"unknown model {model}")
    return b.build(model)


# ---------------------------------------------------------------- traces

def _replica_events(trace_type: str, k: str) -> list[Event]:
    """The full trace of one replica for a trace type."""
    det = trace_type in ("T1", "T3", "T5", "T6")
    loops = 2 if trace_type in ("T3", "T4", "T6", "T8") else 0
    data_violation = trace_type in ("T7", "T8")
    first = 0 if data_violation else 1
    second = 0 if det else 2
    ev = [Event(k + "A", {k + "first": first, k + "second": second, k + "third": 0, k + "fourth": 4})]
    ev += [Event(k + "B"), Event(k + "D")]
    if trace_type in ("T5", "T6"):
        ev += [Event(k + "C"), Event(k + "E")]
    ev += [Event(k + "F"), Event(k + "G", {k + "fifth": 5}), Event(k + "H")]
    for _ in range(loops):
        ev += [Event(k + "I", {k + "number": 0}), Event(k + "L")]
    ev += [Event(k + "I", {k + "number": 5}), Event(k + "M")]
    if trace_type in ("T2", "T4"):
        ev += [Event(k + "O"), Event(k + "S")]      # N was possible as well
    else:
        ev += [Event(k + "N"), Event(k + "R")]
    ev.append(Event(k + "U"))
    return ev


def _violation(trace_type: str, k: str) -> tuple[str, str] | None:
    """A pair of transitions that no case can contain together with the observed data."""
    if trace_type in ("T5", "T6"):
        return k + "B", k + "C"
    if trace_type in ("T7", "T8"):
        return k + "A", k + "N"
    return None


# which branch of M5's exclusive choice each trace type runs through
_M5_BRANCH = {"T1": ["K0_", "K1_"], "T2": ["K2_"], "T3": ["K0_", "K1_"], "T4": ["K0_", "K1_"],
              "T5": ["K2_"], "T6": ["K0_", "K1_"], "T7": ["K2_"], "T8": ["K2_"]}


def full_trace(model: str, trace_type: str) -> Trace:
    ks = _M5_BRANCH[trace_type] if model == "M5" else replica_prefixes(model)
    events = []
    for k in ks:
        events += _replica_events(trace_type, k)
    return Trace(tuple(events))


def kept_length(n: int, completeness: int) -> int:
    return int(n * completeness / 100 + 0.5)


def drop_events(model: str, spec: BenchSpec, tau: Trace, rng: random.Random) -> Trace:
    """Keep a uniform random subset of the events of the given size, in order.

    Non-compliant traces always keep one violating pair, so dropping events
    never makes them compliant.
    """
    n = len(tau)
    k = kept_length(n, spec.completeness)
    if k == 0:
        return Trace(())
    must = []
    ks = _M5_BRANCH[spec.trace_type] if model == "M5" else replica_prefixes(model)
    pair = _violation(spec.trace_type, ks[0])
    if pair is not None:
        for t in pair:
            must.append(next(i for i, e in enumerate(tau) if e.transition == t))
    rest = [i for i in range(n) if i not in must]
    chosen = set(must) | set(rng.sample(rest, k - len(must)))
    return Trace(tuple(tau[i] for i in sorted(chosen)))


def gen_bench(spec: BenchSpec, seed: int = 0) -> tuple[DawNet, Trace]:
    w = build_model(spec.model)
    rng = random.Random(f"{seed}/{spec.label()}")
    tau = drop_events(spec.model, spec, full_trace(spec.model, spec.trace_type), rng)
    return w, tau


def write_bench(spec: BenchSpec, seed: int, outdir) -> tuple[Path, Path]:
    from .modelfile import save_model
    from .tracefile import save_trace
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    w, tau = gen_bench(spec, seed)
    mp = out / f"{spec.model}.daw"
    tp = out / f"{spec.label()}.trace"
    save_model(w, mp)
    save_trace(tau, tp)
    return mp, tp


@dataclass(frozen=True)
class BenchRow:
    spec: BenchSpec
    length: int
    completable: bool | None
    seconds: float

    @property
    def correct(self) -> bool:
        return self.completable is self.spec.compliant


def run_bench(specs=None, seed: int = 0, max_states: int = 10**6) -> list[BenchRow]:
    import time
    rows = []
    models = {}
    for spec in specs or all_specs():
        w = models.get(spec.model) or models.setdefault(spec.model, build_model(spec.model))
        _, tau = gen_bench(spec, seed)
        t0 = time.perf_counter()
        res = complete(w, tau, max_states=max_states)
        rows.append(BenchRow(spec, len(tau), res.reachable, time.perf_counter() - t0))
    return rows
