"""Reachability on DAW-nets: shortest-witness BFS and a brute-force oracle."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

from .core_net import Marking
from .guard_lang import TRUE, GuardExpr, compile_guard, evaluate
from .model import DawNet, Engine, State, enabled, choices, fire_data


@dataclass(frozen=True)
class Goal:
    """Target states: an exact marking (None = any) plus a guard over the assignment."""

    marking: Mapping[str, int] | None = None
    guard: GuardExpr = TRUE

    def holds(self, w: DawNet, s: State) -> bool:
        if self.marking is not None and s.marking != Marking.of(w.net, self.marking):
            return False
        return evaluate(self.guard, w.data, s.eta)


def clean_termination(w: DawNet) -> Goal:
    """Final states: one token in the sink, nothing else, any assignment."""
    return Goal({w.sink: 1})


@dataclass(frozen=True)
class Step:
    transition: str
    choice: dict
    state: State


@dataclass(frozen=True)
class ReachResult:
    reachable: bool | None          # None when the search was cut off
    witness: tuple[Step, ...] | None
    explored: int
    truncated: bool = False
    initial: State | None = None

    @property
    def answer(self) -> str:
        return {True: "yes", False: "no", None: "unknown"}[self.reachable]

    def transitions(self) -> list[str]:
        return [s.transition for s in self.witness or ()]


def _goal_test(eng: Engine, w: DawNet, goal):
    if goal is None:
        target = eng.final_mask
        return lambda key: key[0] == target
    if isinstance(goal, Goal):
        if goal.marking is None:
            mtest = lambda m: True
        else:
            target = eng._mask(p for p, c in goal.marking.items() if c)
            if any(c > 1 for c in goal.marking.values()):
                return lambda key: False
            mtest = lambda m: m == target
        g = compile_guard(goal.guard, w.data, eng.vidx)
        return lambda key: mtest(key[0]) and g(key[1])
    if callable(goal):
        return lambda key: bool(goal(eng.state(key)))
    raise TypeError("goal must be a Goal, a callable over State, or None")


def solve(w: DawNet, goal: Goal | Callable[[State], bool] | None = None,
          max_states: int = 10**6, max_depth: int | None = None) -> ReachResult:
    """Breadth-first search from the initial state; the first goal state gives a shortest witness.

    `goal=None` means clean termination. Expansion order is canonical (transition
    order, then write choices in value order), so the witness is reproducible.
    """
    eng = Engine(w)
    test = _goal_test(eng, w, goal)
    start = eng.initial
    parent = {start: None}
    init_state = eng.state(start)
    if test(start):
        return ReachResult(True, (), 1, False, init_state)
    frontier = [start]
    depth = 0
    truncated = False
    while frontier:
        if max_depth is not None and depth >= max_depth:
            truncated = True
            break
        nxt = []
        for k in frontier:
            for ri, oi, k2 in eng.expand(k):
                if k2 in parent:
                    continue
                parent[k2] = (k, ri, oi)
                if test(k2):
                    return ReachResult(True, _witness(eng, parent, k2), len(parent), False, init_state)
                if len(parent) >= max_states:
                    return ReachResult(None, None, len(parent), True, init_state)
                nxt.append(k2)
        frontier = nxt
        depth += 1
    if truncated:
        return ReachResult(None, None, len(parent), True, init_state)
    return ReachResult(False, None, len(parent), False, init_state)


def _witness(eng, parent, key):
    steps = []
    while parent[key] is not None:
        prev, ri, oi = parent[key]
        steps.append(Step(eng.trans[ri], eng.choice(ri, oi), eng.state(key)))
        key = prev
    return tuple(reversed(steps))


def replay(w: DawNet, witness, start: State | None = None) -> State:
    """Re-fire a witness with the reference semantics, checking every listed state."""
    s = start or w.initial_state()
    for i, step in enumerate(witness):
        s = fire_data(w, s, step.transition, step.choice)
        if s != step.state:
            raise AssertionError(f"step {i} ({step.transition}) reaches {s}, witness says {step.state}")
    return s


class BudgetExceeded(Exception):
    pass


def brute_force_oracle(w: DawNet, goal: Goal | Callable[[State], bool] | None = None,
                       max_len: int = 10, budget: int = 10**5) -> bool:
    """Depth-first enumeration of firing sequences up to max_len, with no state table.

    Only states on the current path are remembered, to skip cycles: a shortest
    witness never repeats a state, so this keeps the answer exact. Uses the
    reference firing operations, independent of the compiled engine.
    """
    if goal is None:
        goal = clean_termination(w)
    test = (lambda s: goal.holds(w, s)) if isinstance(goal, Goal) else goal
    count = 0

    def dfs(s, on_path, depth):
        nonlocal count
        count += 1
        if count > budget:
            raise BudgetExceeded(f"more than {budget} path prefixes")
        if test(s):
            return True
        if depth == max_len:
            return False
        for t in enabled(w, s):
            for ch in choices(w, t):
                s2 = fire_data(w, s, t, ch)
                if s2 in on_path:
                    continue
                on_path.add(s2)
                found = dfs(s2, on_path, depth + 1)
                on_path.discard(s2)
                if found:
                    return True
        return False

    s0 = w.initial_state()
    return dfs(s0, {s0}, 0)


def shortest_length_oracle(w: DawNet, goal=None, max_len: int = 10, budget: int = 10**5) -> int | None:
    """Iterative deepening over brute_force_oracle: the length of a shortest witness."""
    for n in range(max_len + 1):
        if brute_force_oracle(w, goal, n, budget):
            return n
    return None
