"""Property checks shared by the module tests and the acceptance run.

Each check returns a Report: how many cases ran, which failed, and a short note.
"""

import random
import time
from dataclasses import dataclass, field

from dawnet.data_model import DataModel
from dawnet.guard_lang import (TRUE, And, Const, Def, Eq, Leq, Not, Var, active_domain, evaluate, parse,
                               to_ground_dnf, to_text, variables)


@dataclass
class Report:
    name: str
    total: int = 0
    failures: list = field(default_factory=list)
    seconds: float = 0.0
    note: str = ""

    @property
    def ok(self):
        return self.total > 0 and not self.failures

    def line(self):
        status = "PASS" if self.ok else "FAIL"
        extra = f"; {self.note}" if self.note else ""
        return f"{status} {self.name}: {self.total - len(self.failures)}/{self.total} in {self.seconds:.1f}s{extra}"


class timed:
    def __init__(self, report):
        self.report = report

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self.report

    def __exit__(self, *exc):
        self.report.seconds = time.perf_counter() - self.t0
        return False


# ---------------------------------------------------------------- guards

_STRINGS = ["a", "b", "c", 'q"x', "back\\slash", "sp ace"]


def random_guard_model(rng):
    """Up to three variables with ranges of at most four values: ints, strings (some ordered) or booleans."""
    domains, orders = {}, {}
    for i in range(rng.randint(1, 3)):
        v = f"v{i}"
        kind = rng.random()
        if kind < 0.5:
            domains[v] = tuple(rng.sample(range(-2, 6), rng.randint(1, 4)))
        elif kind < 0.85:
            vals = rng.sample(_STRINGS, rng.randint(1, 4))
            domains[v] = tuple(vals)
            if len(vals) > 1 and rng.random() < 0.5:
                orders[v] = tuple(zip(vals, vals[1:]))
        else:
            domains[v] = tuple(rng.sample([True, False], rng.randint(1, 2)))
    return DataModel.create(domains, orders)


def random_formula(rng, data, depth=3):
    vs = list(data.variables)

    def term(v):
        r = rng.random()
        if r < 0.5:
            return Const(rng.choice(data.domain(v)))
        return Var(rng.choice(vs))

    def atom():
        v = rng.choice(vs)
        r = rng.random()
        if r < 0.1:
            return TRUE
        if r < 0.25:
            return Def(v)
        if r < 0.65:
            return Eq(Var(v), term(v))
        lhs = Var(v) if rng.random() < 0.6 else Const(rng.choice(data.domain(v)))
        return Leq(lhs, term(v))

    def gen(d):
        r = rng.random()
        if d == 0 or r < 0.3:
            return atom()
        if r < 0.55:
            return Not(gen(d - 1))
        return And(gen(d - 1), gen(d - 1))

    return gen(depth)


def random_eta(rng, data, mentioned, all_bound):
    eta = {}
    for v in data.variables:
        if (all_bound and v in mentioned) or rng.random() < 0.7:
            eta[v] = rng.choice(data.domain(v))
    return eta


def guard_dnf_agreement(count=10_000, seed=0):
    """evaluate(phi) == the ground DNF read literal-wise, with every mentioned variable bound.

    A second pass drops the binding requirement and uses the strict rewrite, which must agree everywhere.
    """
    rng = random.Random(seed)
    rep = Report("eval/DNF agreement", note="plus strict rewrite on partial assignments")
    with timed(rep):
        for i in range(count):
            data = random_guard_model(rng)
            phi = random_formula(rng, data, rng.randint(0, 3))
            ranges = {v: data.domain(v) for v in data.variables}
            eta = random_eta(rng, data, variables(phi), all_bound=True)
            want = evaluate(phi, data, eta)
            if to_ground_dnf(phi, data, ranges).holds(eta) != want:
                rep.failures.append((to_text(phi), eta, "relaxed"))
            eta2 = random_eta(rng, data, (), all_bound=False)
            if to_ground_dnf(phi, data, ranges, strict_undef=True).holds(eta2) != evaluate(phi, data, eta2):
                rep.failures.append((to_text(phi), eta2, "strict"))
            rep.total += 1
    return rep


def guard_adm_restriction(count=1_000, seed=1):
    """Cutting every domain down to the formula's constants plus the assigned values changes nothing."""
    rng = random.Random(seed)
    rep = Report("active-domain restriction")
    with timed(rep):
        for _ in range(count):
            data = random_guard_model(rng)
            phi = random_formula(rng, data, rng.randint(0, 3))
            eta = random_eta(rng, data, (), all_bound=False)
            keep = list(active_domain(phi)) + list(eta.values())
            small = data.restrict({v: keep for v in data.variables})
            if evaluate(phi, data, eta) != evaluate(phi, small, eta):
                rep.failures.append((to_text(phi), eta))
            rep.total += 1
    return rep


def guard_roundtrip(count=1_000, seed=2):
    rng = random.Random(seed)
    rep = Report("parser round-trip")
    with timed(rep):
        for _ in range(count):
            data = random_guard_model(rng)
            phi = random_formula(rng, data, rng.randint(0, 4))
            text = to_text(phi)
            back = parse(text, data)
            if back != phi or to_text(back) != text:
                rep.failures.append(text)
            rep.total += 1
    return rep


# ---------------------------------------------------------------- nets

def fires_to_final(w, transitions_and_choices):
    """Replay (transition, choice) pairs with the reference semantics; the final state, or None if a step fails."""
    from dawnet.model import fire_data
    s = w.initial_state()
    try:
        for t, ch in transitions_and_choices:
            s = fire_data(w, s, t, ch)
    except Exception:
        return None
    return s


def oracle_agreement(count=500, seed=1, check_minimal=True):
    """solve vs the brute-force path enumeration on random safe nets; witnesses replay and are shortest."""
    from dawnet.generators import random_suite
    from dawnet.solver import replay, shortest_length_oracle, solve
    rep = Report("solve vs brute-force oracle")
    with timed(rep):
        suite = random_suite(seed, count)
        yes = 0
        for w in suite:
            res = solve(w)
            if check_minimal:
                n = shortest_length_oracle(w, max_len=12)
                want = n is not None
            else:
                from dawnet.solver import brute_force_oracle
                want, n = brute_force_oracle(w, max_len=12), None
            rep.total += 1
            if res.reachable is not want:
                rep.failures.append((w.name, res.reachable, want))
                continue
            if res.reachable:
                yes += 1
                final = replay(w, res.witness)
                if not w.is_final(final) or (n is not None and len(res.witness) != n):
                    rep.failures.append((w.name, "witness", len(res.witness), n))
        rep.note = f"{yes} reachable, {count - yes} not"
    return rep


def _chain_position(tw, state):
    marked = [i for i, p in tw.event_place_of.items() if state.marking[p]]
    return marked


def completion_properties(count=300, seed=7, max_len=10, lift_limit=20):
    """Completion is sound and complete w.r.t. compliance, and W^tau stays safe.

    Returns two reports: completion agrees with compliance in both directions, and W^tau stays safe.
    Sound: each completion replays on W, ends final, and tau is compliant with it.
    Complete: when complete() says UNSAT, no case of W up to max_len firings is compliant;
    when it says SAT, every compliant case found lifts to a case of W^tau that projects back onto it.
    """
    from dawnet.generators import random_net_trace_pairs
    from dawnet.model import build_rg, fire_data
    from dawnet.solver import Step, replay
    from dawnet.trace import END_T, START_T, check_compliance, complete, inject, lift_case, project, sample_cases

    thm = Report("completion vs compliance, both directions")
    safe = Report("W^tau stays 1-safe")
    with timed(thm):
        pairs = random_net_trace_pairs(seed, count)
        sat = lifted_n = 0
        for w, tau in pairs:
            thm.total += 1
            c = complete(w, tau)
            compliant = []
            for case in sample_cases(w, max_len):
                g = check_compliance(w, case, tau)
                if g is not None:
                    compliant.append((case, g))
            if c.reachable:
                sat += 1
                ok = w.is_final(replay(w, c.case)) and check_compliance(w, list(c.case), tau) is not None
                if not ok:
                    thm.failures.append((w.name, str(tau), "completion not compliant"))
                    continue
                tw = c.workflow
                for case, g in compliant[:lift_limit]:
                    lifted = lift_case(tw, case, g)
                    lifted_n += 1
                    wrapped = [(START_T, {})] + [(s.transition, s.choice) for s in lifted] + [(END_T, {})]
                    s = tw.net.initial_state()
                    steps = []
                    try:
                        for t, ch in wrapped:
                            s = fire_data(tw.net, s, t, ch)
                            steps.append(Step(t, ch, s))
                    except Exception as e:
                        thm.failures.append((w.name, str(tau), f"lifted case does not fire: {e}"))
                        break
                    back = [st.transition for st in project(tw, steps)][1:-1]
                    if not tw.net.is_final(s) or back != [st.transition for st in case]:
                        thm.failures.append((w.name, str(tau), "lifted case does not project back"))
                        break
            elif c.reachable is False:
                if compliant:
                    thm.failures.append((w.name, str(tau), "UNSAT but a compliant case exists"))
            else:
                thm.failures.append((w.name, str(tau), "search truncated"))
    thm.note = (f"{sat} completable, {count - sat} not; {lifted_n} compliant cases lifted; "
                f"cases enumerated up to {max_len} firings")
    with timed(safe):
        for w, tau in pairs:
            safe.total += 1
            tw = inject(w, tau)
            try:
                rg = build_rg(tw.net)
            except Exception as e:
                safe.failures.append((w.name, str(tau), str(e)))
                continue
            if any(c > 1 for s in rg.states for c in s.marking.counts):
                safe.failures.append((w.name, str(tau), "two tokens in a place"))
                continue
            pos = {i: _chain_position(tw, s) for i, s in enumerate(rg.states)}
            for a, t, b in rg.edges:
                if len(pos[a]) > 1 or len(pos[b]) > 1 or (pos[a] and pos[b] and pos[b][0] < pos[a][0]):
                    safe.failures.append((w.name, str(tau), "event chain fired out of order"))
                    break
    return thm, safe


def encoding_suite(count=300, seed=1, bound=5):
    """BC, PDDL and SMV against RG / RG~ on random nets, then every canned mutation must be caught somewhere."""
    from dawnet.encoding_check import MUTATIONS, check_bc, check_pddl, check_smv
    from dawnet.generators import random_suite

    equiv = Report(f"encoding trace equivalence (bound {bound})")
    muts = Report("mutations detected")
    suite = random_suite(seed, count)
    with timed(equiv):
        for w in suite:
            for name, check in (("bc", check_bc), ("pddl", check_pddl), ("smv", check_smv)):
                equiv.total += 1
                r = check(w, bound)
                if not r:
                    equiv.failures.append((name, w.name, r.reason))
        equiv.note = f"{count} nets x 3 encodings"
    with timed(muts):
        hits = {}
        for m in MUTATIONS:
            muts.total += 1
            first = next((w.name for w in suite if m.detected(w, bound)), None)
            hits[m.name] = first
            if first is None:
                muts.failures.append(m.name)
        muts.note = ", ".join(f"{k}@{v}" for k, v in hits.items())
    return equiv, muts


def bench_fidelity(seed=0):
    """All 200 synthetic runs. Returns the ground-truth report and the literal-wording report.

    Ground truth: T1-T4 completable, T5-T8 not, and the empty 0% trace completable.
    Literal wording: T5-T8 UNSAT at every level, 0% included.
    """
    from dawnet.bench import COMPLIANT, run_bench
    truth = Report("synthetic benchmark vs ground truth")
    literal = Report("synthetic benchmark, T5-T8 UNSAT at every level as worded")
    with timed(truth):
        rows = run_bench(seed=seed)
    literal.seconds = truth.seconds
    for r in rows:
        truth.total += 1
        if not r.correct:
            truth.failures.append((r.spec.label(), r.completable))
        literal.total += 1
        want = r.spec.trace_type in COMPLIANT
        if r.completable is not want:
            literal.failures.append(r.spec.label())
    truth.note = f"slowest run {max(r.seconds for r in rows):.2f}s"
    at_zero = [lab for lab in literal.failures if lab.endswith("-0")]
    if literal.failures:
        where = "all at 0% completeness" if len(at_zero) == len(literal.failures) else \
            f"{len(at_zero)} of them at 0% completeness"
        literal.note = (f"{len(literal.failures)} runs differ, {where}; the 0% trace is empty and "
                        f"every model has a case, so no T5-T8 run there can be UNSAT")
    return truth, literal, rows


# ---------------------------------------------------------------- loan and goldens

def loan_behaviors():
    """The three loan claims: a case exists, T2 and T8 never share a case, and the worker-loan completion."""
    from dawnet.modelfile import load_bundled
    from dawnet.solver import solve
    from dawnet.trace import Event, Trace, complete
    rep = Report("loan example behaviors")
    with timed(rep):
        w = load_bundled("loan")
        res = solve(w)
        rep.total += 1
        if not res.reachable:
            rep.failures.append("no case reaches the final marking")

        rep.total += 1
        c = complete(w, Trace((Event("T2"), Event("T8"))))
        if c.reachable is not False:
            rep.failures.append(f"{{T2, T8}} gave {c.reachable}, expected UNSAT")

        rep.total += 1
        c = complete(w, Trace((Event("T7", {"request": 60000, "loan": 50000}),)))
        names = [st.transition for st in c.case] if c.reachable else []
        why = None
        if not c.reachable:
            why = "worker-loan trace not completed"
        elif c.case[names.index("T1")].choice.get("loanType") != "w":
            why = f"T1 chose {c.case[names.index('T1')].choice}"
        elif not ("T3" in names and "T5" in names and names.index("T3") < names.index("T5") < names.index("T7")):
            why = f"completion {names} does not run T3, T5 before T7"
        if why:
            rep.failures.append(why)
        else:
            rep.note = "completion " + " ".join(names)
    return rep


def golden_stability():
    """Encode loan and M1 for every target in a fresh interpreter and compare with tests/golden byte for byte."""
    import os
    import subprocess
    import sys
    import tempfile
    from pathlib import Path
    here = Path(__file__).parent
    sys.path.insert(0, str(here))
    from test_golden import GOLDEN, MODELS, golden_cases
    rep = Report("golden encoder outputs")
    with timed(rep), tempfile.TemporaryDirectory() as tmp:
        seeds = ("0", "1", "4242")
        for seed in seeds:
            out = Path(tmp) / seed
            script = (f"import sys; sys.path.insert(0, {str(here)!r}); from pathlib import Path; "
                      f"from test_golden import render; [render(m, Path({str(out)!r}) / m) for m in {MODELS!r}]")
            subprocess.run([sys.executable, "-c", script], check=True, capture_output=True,
                           env=dict(os.environ, PYTHONHASHSEED=seed))
            for model, name in golden_cases():
                rep.total += 1
                got = out / model / name
                if not got.exists() or got.read_bytes() != (GOLDEN / model / name).read_bytes():
                    rep.failures.append(f"{model}/{name} with PYTHONHASHSEED={seed}")
        rep.note = f"{len(golden_cases())} files x {len(seeds)} hash seeds"
    return rep
