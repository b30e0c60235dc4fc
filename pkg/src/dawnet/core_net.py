"""Petri nets and workflow nets: structure, markings and control-flow firing."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping


class NetError(Exception):
    """Base class for structural and firing errors."""


class UnknownNode(NetError, KeyError):
    def __init__(self, node):
        super().__init__(node)
        self.node = node

    def __str__(self):
        return f"unknown node {self.node!r}"


class MalformedNet(NetError, ValueError):
    pass


class NotEnabled(NetError):
    def __init__(self, transition, missing):
        self.transition = transition
        self.missing = tuple(missing)
        super().__init__(f"{transition} is not enabled (empty input places: {', '.join(self.missing)})")


class ExplorationBudgetExceeded(NetError):
    def __init__(self, explored):
        self.explored = explored
        super().__init__(f"state budget exceeded after {explored} markings")


@dataclass(frozen=True)
class PetriNet:
    """A place/transition net with unit arc weights.

    Places and transitions are kept sorted so every iteration order is stable.
    """

    places: tuple[str, ...]
    transitions: tuple[str, ...]
    flow: frozenset[tuple[str, str]]
    _pre: dict = field(default=None, repr=False, compare=False, hash=False)
    _post: dict = field(default=None, repr=False, compare=False, hash=False)

    def __post_init__(self):
        places = tuple(sorted(set(self.places)))
        transitions = tuple(sorted(set(self.transitions)))
        if len(places) != len(self.places) or len(transitions) != len(self.transitions):
            raise MalformedNet("duplicate node identifiers")
        clash = set(places) & set(transitions)
        if clash:
            raise MalformedNet(f"identifiers used as place and transition: {sorted(clash)}")
        pset, tset = set(places), set(transitions)
        pre = {n: set() for n in places + transitions}
        post = {n: set() for n in places + transitions}
        for src, dst in self.flow:
            ok = (src in pset and dst in tset) or (src in tset and dst in pset)
            if not ok:
                if src not in pset | tset or dst not in pset | tset:
                    raise MalformedNet(f"arc ({src}, {dst}) mentions an unknown node")
                raise MalformedNet(f"arc ({src}, {dst}) connects two nodes of the same kind")
            post[src].add(dst)
            pre[dst].add(src)
        object.__setattr__(self, "places", places)
        object.__setattr__(self, "transitions", transitions)
        object.__setattr__(self, "flow", frozenset(self.flow))
        object.__setattr__(self, "_pre", {k: frozenset(v) for k, v in pre.items()})
        object.__setattr__(self, "_post", {k: frozenset(v) for k, v in post.items()})

    @classmethod
    def build(cls, places: Iterable[str], transitions: Iterable[str], arcs: Iterable[tuple[str, str]]) -> "PetriNet":
        return cls(tuple(places), tuple(transitions), frozenset(arcs))

    def nodes(self) -> tuple[str, ...]:
        return self.places + self.transitions

    def preset(self, node: str) -> frozenset[str]:
        try:
            return self._pre[node]
        except KeyError:
            raise UnknownNode(node) from None

    def postset(self, node: str) -> frozenset[str]:
        try:
            return self._post[node]
        except KeyError:
            raise UnknownNode(node) from None

    def arcs(self) -> list[tuple[str, str]]:
        return sorted(self.flow)


def preset(net: PetriNet, node: str) -> frozenset[str]:
    """Input nodes of `node`: {x | (x, node) in F}."""
    return net.preset(node)


def postset(net: PetriNet, node: str) -> frozenset[str]:
    return net.postset(node)


class Marking(Mapping[str, int]):
    """Total map from the places of a net to token counts. Hashable and immutable."""

    __slots__ = ("_places", "_counts", "_index")

    def __init__(self, places: tuple[str, ...], counts: Iterable[int]):
        counts = tuple(int(c) for c in counts)
        if len(counts) != len(places):
            raise ValueError("marking needs one count per place")
        if any(c < 0 for c in counts):
            raise ValueError("token counts must be non-negative")
        self._places = places
        self._counts = counts
        self._index = None

    @classmethod
    def of(cls, net: PetriNet, tokens: Mapping[str, int] | Iterable[str] = ()) -> "Marking":
        """Build from a partial count map (missing places get 0) or an iterable of marked places."""
        if isinstance(tokens, Mapping):
            counts = dict(tokens)
        else:
            counts = {}
            for p in tokens:
                counts[p] = counts.get(p, 0) + 1
        for p in counts:
            if p not in net.places:
                raise UnknownNode(p)
        return cls(net.places, (counts.get(p, 0) for p in net.places))

    @property
    def places(self) -> tuple[str, ...]:
        return self._places

    @property
    def counts(self) -> tuple[int, ...]:
        return self._counts

    def __getitem__(self, place: str) -> int:
        if self._index is None:
            self._index = {p: i for i, p in enumerate(self._places)}
        try:
            return self._counts[self._index[place]]
        except KeyError:
            raise UnknownNode(place) from None

    def __iter__(self) -> Iterator[str]:
        return iter(self._places)

    def __len__(self) -> int:
        return len(self._places)

    def __hash__(self):
        return hash((self._places, self._counts))

    def __eq__(self, other):
        if isinstance(other, Marking):
            return self._places == other._places and self._counts == other._counts
        return NotImplemented

    def support(self) -> tuple[str, ...]:
        return tuple(p for p, c in zip(self._places, self._counts) if c)

    def total(self) -> int:
        return sum(self._counts)

    def is_safe(self) -> bool:
        return all(c <= 1 for c in self._counts)

    def __repr__(self):
        inner = ", ".join(f"{p}: {c}" for p, c in zip(self._places, self._counts) if c)
        return f"Marking({{{inner}}})"


@dataclass(frozen=True)
class WfNetCheck:
    is_wf: bool
    source: str | None
    sink: str | None
    unreachable_nodes: list[str]
    sources: tuple[str, ...] = ()
    sinks: tuple[str, ...] = ()


def check_wf(net: PetriNet) -> WfNetCheck:
    """Diagnose the WF-net conditions: one source place, one sink place, every node on a source-sink path."""
    sources = tuple(p for p in net.places if not net.preset(p))
    sinks = tuple(p for p in net.places if not net.postset(p))
    source = sources[0] if len(sources) == 1 else None
    sink = sinks[0] if len(sinks) == 1 else None
    # with several sources/sinks, report nodes lying on no source-to-sink path at all
    fwd = _closure(net, list(sources), forward=True)
    bwd = _closure(net, list(sinks), forward=False)
    unreachable = sorted(n for n in net.nodes() if n not in fwd or n not in bwd)
    is_wf = source is not None and sink is not None and not unreachable
    return WfNetCheck(is_wf, source, sink, unreachable, sources, sinks)


def _closure(net: PetriNet, roots, forward: bool) -> set[str]:
    seen = set(roots)
    todo = deque(roots)
    step = net.postset if forward else net.preset
    while todo:
        n = todo.popleft()
        for m in step(n):
            if m not in seen:
                seen.add(m)
                todo.append(m)
    return seen


def is_enabled(net: PetriNet, m: Marking, t: str) -> bool:
    return all(m[p] > 0 for p in net.preset(t))


def fire(net: PetriNet, m: Marking, t: str) -> Marking:
    """Fire `t`: -1 on inputs that are not outputs, +1 on outputs that are not inputs."""
    if t not in net.transitions:
        raise UnknownNode(t)
    pre, post = net.preset(t), net.postset(t)
    missing = sorted(p for p in pre if m[p] == 0)
    if missing:
        raise NotEnabled(t, missing)
    counts = []
    for p, c in zip(m.places, m.counts):
        if p in pre and p not in post:
            c -= 1
        elif p in post and p not in pre:
            c += 1
        counts.append(c)
    return Marking(m.places, counts)


@dataclass(frozen=True)
class BoundResult:
    bounded: bool
    witness: tuple[str, ...] = ()
    explored: int = 0

    def __bool__(self):
        return self.bounded


def check_bounded(net: PetriNet, k: int = 1, depth: int | None = None,
                  initial: Marking | None = None, max_states: int = 10**6) -> BoundResult:
    """Explore markings reachable from the initial one (one token in the source) up to `depth` firings.

    Returns a falsy result carrying a firing sequence when some place exceeds `k`.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if initial is None:
        chk = check_wf(net)
        if chk.source is None:
            raise MalformedNet("check_bounded needs a net with a unique source place")
        initial = Marking.of(net, [chk.source])
    if any(c > k for c in initial.counts):
        return BoundResult(False, (), 1)
    parent: dict[Marking, tuple[Marking, str] | None] = {initial: None}
    frontier = [initial]
    level = 0
    while frontier and (depth is None or level < depth):
        nxt = []
        for m in frontier:
            for t in net.transitions:
                if not is_enabled(net, m, t):
                    continue
                m2 = fire(net, m, t)
                if m2 in parent:
                    continue
                parent[m2] = (m, t)
                if any(c > k for c in m2.counts):
                    return BoundResult(False, _path(parent, m2), len(parent))
                if len(parent) > max_states:
                    raise ExplorationBudgetExceeded(len(parent))
                nxt.append(m2)
        frontier = nxt
        level += 1
    return BoundResult(True, (), len(parent))


def _path(parent, m) -> tuple[str, ...]:
    seq = []
    while parent[m] is not None:
        m, t = parent[m]
        seq.append(t)
    return tuple(reversed(seq))
