"""Trace-equivalence checks of the three encodings, and the canned mutations used to test the checks.

Each check builds the reachability graph of the (finitely restricted) net,
runs the reference interpreter on the encoding and compares paths up to a
bound. A mutation corrupts one encoding in one specific way; a check that is
worth anything must report a difference for it on some net.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

from . import encoder_bc, encoder_pddl, encoder_smv
from .model import DawNet, build_rg, restrict_finite
from .ref_semantics import EquivReport, bc_state_key, rg_successors, trace_equiv, ts_bc, ts_pddl, ts_smv


def _run(thunk) -> EquivReport:
    # the reference interpreters assert their own invariants (one action per BC step, a unique
    # initial state); a broken encoding that trips one is a detected difference
    try:
        return thunk()
    except AssertionError as e:
        return EquivReport(False, (), f"reference interpreter: {e}")


def check_bc(w: DawNet, max_len: int = 5, mutate: Callable | None = None, exact_guards: bool = True) -> EquivReport:
    w = restrict_finite(w)
    rg = build_rg(w)
    b = encoder_bc.encode_bc(w, exact_guards=exact_guards)
    if mutate:
        b = mutate(b)
    return _run(lambda: trace_equiv(rg.states[rg.initial], rg_successors(rg), ts_bc(b),
                                    lambda s: bc_state_key(b, w, s), max_len))


def check_pddl(w: DawNet, max_len: int = 5, mutate: Callable | None = None, lowered: bool = True,
               encode_from: DawNet | None = None, **encode_kw) -> EquivReport:
    """encode_from lets a mutation encode a different net than the one the RG is built from."""
    w = restrict_finite(w)
    rg = build_rg(w)
    src = restrict_finite(encode_from) if encode_from is not None else w
    d, s0, _ = encoder_pddl.encode_sv(src, **encode_kw)
    if lowered:
        d = encoder_pddl.with_old_value_links(encoder_pddl.lower_classical(d))
    if mutate:
        d = mutate(d)
    return _run(lambda: trace_equiv(rg.states[rg.initial], rg_successors(rg), ts_pddl(d, s0),
                                    lambda s: encoder_pddl.psi(d, w, s), max_len))


def check_smv(w: DawNet, max_len: int = 5, **encode_kw) -> EquivReport:
    w = restrict_finite(w)
    rg = build_rg(w)
    m = encoder_smv.encode_smv(w, **encode_kw)
    rgt = encoder_smv.build_rg_tilde(rg, w)
    return _run(lambda: trace_equiv(rgt.initial, rgt.successors, ts_smv(m),
                                    lambda s: encoder_smv.smv_state_key(m, w, s), max_len))


# ---------------------------------------------------------------- mutations

def _drop_laws(tag: str, first_only: bool = False):
    def mutate(b):
        out, dropped = [], False
        for law in b.dynamic_laws:
            if law.tag == tag and not (first_only and dropped):
                dropped = True
                continue
            out.append(law)
        return replace(b, dynamic_laws=tuple(out))
    return mutate


def _flip_first_consume(d):
    temps = list(d.templates)
    places = set(d.place_var.values())
    for i, a in enumerate(temps):
        for j, (sv, term) in enumerate(a.eff):
            if sv in places and term == encoder_pddl.Obj(False):
                eff = list(a.eff)
                eff[j] = (sv, encoder_pddl.Obj(True))
                temps[i] = replace(a, eff=tuple(eff))
                return replace(d, templates=tuple(temps))
    return d


@dataclass(frozen=True)
class Mutation:
    name: str
    target: str
    check: Callable[[DawNet, int], EquivReport]

    def detected(self, w: DawNet, max_len: int = 5) -> bool:
        return not self.check(w, max_len).equivalent


MUTATIONS = (
    Mutation("bc-drop-produce", "bc", lambda w, n: check_bc(w, n, _drop_laws("produce", first_only=True))),
    Mutation("bc-drop-mutex", "bc", lambda w, n: check_bc(w, n, _drop_laws("mutex"))),
    Mutation("bc-drop-enabledness", "bc", lambda w, n: check_bc(w, n, _drop_laws("enabled"))),
    Mutation("bc-missing-null-case", "bc", lambda w, n: check_bc(w, n, exact_guards=False)),
    Mutation("bc-drop-delete", "bc", lambda w, n: check_bc(w, n, _drop_laws("delete"))),
    Mutation("pddl-flip-effect", "pddl", lambda w, n: check_pddl(w, n, _flip_first_consume)),
    Mutation("pddl-drop-guard", "pddl",
             lambda w, n: check_pddl(w, n, encode_from=w.replace(guards={}))),
    Mutation("pddl-eq-without-null", "pddl", lambda w, n: check_pddl(w, n, eq_null_check=False)),
    Mutation("smv-drop-frame", "smv", lambda w, n: check_smv(w, n, drop_frame=True)),
    Mutation("smv-drop-last-init", "smv", lambda w, n: check_smv(w, n, drop_last_init=True)),
)
