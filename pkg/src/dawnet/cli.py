"""Command line: check, complete, encode, simulate, bench gen, bench run.

Exit codes: 0 yes (reachable, completed, all runs correct), 1 no, 2 unknown
(a state or depth cap was hit), 3 bad input. Default caps come from the
environment variables DAWNET_MAX_STATES and DAWNET_MAX_DEPTH.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .core_net import ExplorationBudgetExceeded, NotEnabled, check_bounded
from .data_model import DataError, format_value
from .guard_lang import DnfBlowup, GuardSyntaxError
from .model import BadChoice, DawNet, GuardFailed, ModelError, State, UnsafeMarking, fire_data, restrict_finite
from .modelfile import ModelSyntaxError, load_model
from .solver import solve
from .trace import EventSanityViolation, TraceError, complete, inject
from .tracefile import TraceSyntaxError, load_trace, load_xes, parse_trace

EXIT_YES, EXIT_NO, EXIT_UNKNOWN, EXIT_INPUT = 0, 1, 2, 3
_CODE = {True: EXIT_YES, False: EXIT_NO, None: EXIT_UNKNOWN}


class InputError(Exception):
    pass


def _env_int(name: str, default: int | None) -> int | None:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{name} must be an integer, got {raw!r}") from None


def _caps(args):
    max_states = args.max_states if args.max_states is not None else _env_int("DAWNET_MAX_STATES", 10**6)
    max_depth = args.max_depth if args.max_depth is not None else _env_int("DAWNET_MAX_DEPTH", None)
    return max_states, max_depth


def _load(path: str) -> DawNet:
    try:
        return load_model(path)
    except OSError as e:
        raise InputError(f"{path}: {e.strerror or e}") from None
    except (ModelSyntaxError, ModelError, DataError, GuardSyntaxError, ValueError) as e:
        raise InputError(f"{path}: {e}") from None


def _load_trace(args, w: DawNet):
    try:
        if args.format == "xes":
            return load_xes(args.trace, args.trace_index, w.data)
        return load_trace(args.trace)
    except OSError as e:
        raise InputError(f"{args.trace}: {e.strerror or e}") from None
    except (TraceSyntaxError, TraceError, ValueError) as e:
        raise InputError(f"{args.trace}: {e}") from None


def _choice_text(choice) -> str:
    return ", ".join(f"{k} = {format_value(v)}" for k, v in sorted(choice.items()))


def _step_line(t, choice, deleted=()) -> str:
    parts = _choice_text(choice)
    if deleted:
        parts += ("; " if parts else "") + "deleted: " + ", ".join(deleted)
    return t + (f" {{{parts}}}" if parts else "")


def _state_line(w: DawNet, s: State) -> str:
    marked = " ".join(p for p in w.places if s.marking[p] > 0)
    data = ", ".join(f"{k} = {format_value(v)}" for k, v in s.eta.items_sorted())
    return f"[{marked}] {{{data}}}"


# ---------------------------------------------------------------- commands

def cmd_check(args) -> int:
    w = _load(args.model)
    max_states, max_depth = _caps(args)
    try:
        bound = check_bounded(w.net, 1, max_states=max_states)
        if not bound.bounded:
            print(f"not safe: a place gets two tokens after {' '.join(bound.witness) or 'no firing'}")
            return EXIT_INPUT
    except ExplorationBudgetExceeded:
        print("safeness of the control flow not established (state cap reached)")
    try:
        res = solve(w, max_states=max_states, max_depth=max_depth)
    except UnsafeMarking as e:
        print(f"not safe: {e}")
        return EXIT_INPUT
    if res.reachable:
        print(f"REACHABLE in {len(res.witness)} steps ({res.explored} states explored)")
        for st in res.witness:
            print("  " + _step_line(st.transition, st.choice, w.deleted(st.transition)))
    elif res.reachable is None:
        print(f"UNKNOWN: cap reached after {res.explored} states")
    else:
        print(f"UNREACHABLE ({res.explored} states explored)")
    return _CODE[res.reachable]


def cmd_complete(args) -> int:
    w = _load(args.model)
    tau = _load_trace(args, w)
    max_states, max_depth = _caps(args)
    try:
        c = complete(w, tau, max_states=max_states, max_depth=max_depth)
    except EventSanityViolation as e:
        print(f"bad event: {e}", file=sys.stderr)
        return EXIT_INPUT
    if c.reachable is None:
        print(f"UNKNOWN: cap reached after {c.result.explored} states")
    elif not c.reachable:
        print("UNSAT: no case of the model is compliant with the trace")
    else:
        print(f"COMPLETED: {len(c.case)} steps, {sum(c.observed)} observed, "
              f"{len(c.case) - sum(c.observed)} inserted")
        for st, obs in zip(c.case, c.observed):
            mark = "observed" if obs else "inserted"
            print(f"  {mark:8}  {_step_line(st.transition, st.choice, w.deleted(st.transition))}")
    return _CODE[c.reachable]


def cmd_encode(args) -> int:
    from . import encoder_bc, encoder_pddl, encoder_smv
    w = _load(args.model)
    if args.trace:
        tau = _load_trace(args, w)
        try:
            w = inject(w, tau).net
        except EventSanityViolation as e:
            print(f"bad event: {e}", file=sys.stderr)
            return EXIT_INPUT
    w = restrict_finite(w)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    stem = args.name or Path(args.model).stem
    files = {}
    try:
        if args.target == "bc":
            files[f"{stem}.bc"] = encoder_bc.print_bc(encoder_bc.encode_bc(w))
        elif args.target == "asp":
            if args.horizon is None:
                raise InputError("--horizon is required for --target=asp")
            b = encoder_bc.encode_bc(w)
            files[f"{stem}.lp"] = encoder_bc.print_asp(encoder_bc.translate_asp(b, args.horizon))
        elif args.target == "pddl":
            dom, prob = encoder_pddl.encode_pddl(w)
            files["domain.pddl"], files["problem.pddl"] = dom, prob
        else:
            files[f"{stem}.smv"] = encoder_smv.print_smv(encoder_smv.encode_smv(w))
    except DnfBlowup as e:
        print(f"guard too large to ground: {e}", file=sys.stderr)
        return EXIT_INPUT
    for name, text in files.items():
        (out / name).write_text(text, encoding="utf-8", newline="\n")
        print(out / name)
    return EXIT_YES


def cmd_simulate(args) -> int:
    w = _load(args.model)
    text = "\n".join(args.steps)
    if args.file:
        text = Path(args.file).read_text(encoding="utf-8") + "\n" + text
    try:
        steps = parse_trace(text)
    except TraceSyntaxError as e:
        raise InputError(f"steps: {e}") from None
    s = w.initial_state()
    print(f"   {_state_line(w, s)}")
    for i, e in enumerate(steps):
        if e.transition not in w.transitions:
            print(f"step {i}: unknown transition {e.transition}", file=sys.stderr)
            return EXIT_INPUT
        try:
            s = fire_data(w, s, e.transition, dict(e.written))
        except (NotEnabled, GuardFailed, BadChoice, UnsafeMarking, DataError) as ex:
            print(f"step {i}: {e.transition} cannot fire: {ex}", file=sys.stderr)
            return EXIT_NO
        print(f"-> {_step_line(e.transition, e.written, w.deleted(e.transition))}")
        print(f"   {_state_line(w, s)}")
    final = w.is_final(s)
    print("final marking reached" if final else "not in the final marking")
    return EXIT_YES if final else EXIT_NO


def cmd_bench_gen(args) -> int:
    from .bench import LEVELS, MODELS, TRACE_TYPES, BenchSpec, write_bench
    models = args.model or list(MODELS)
    types = args.type or list(TRACE_TYPES)
    levels = args.completeness or list(LEVELS)
    for m in models:
        for t in types:
            for c in levels:
                mp, tp = write_bench(BenchSpec(m, t, c), args.seed, args.output)
                print(tp)
    return EXIT_YES


def cmd_bench_run(args) -> int:
    from .bench import LEVELS, MODELS, TRACE_TYPES, BenchSpec, run_bench
    specs = [BenchSpec(m, t, c) for m in (args.model or MODELS) for t in (args.type or TRACE_TYPES)
             for c in (args.completeness or LEVELS)]
    max_states, _ = _caps(args)
    rows = run_bench(specs, args.seed, max_states=max_states)
    print(f"{'run':16} {'len':>4} {'expected':>11} {'result':>11} {'ok':>3} {'seconds':>8}")
    for r in rows:
        exp = "completable" if r.spec.compliant else "UNSAT"
        got = {True: "completable", False: "UNSAT", None: "unknown"}[r.completable]
        print(f"{r.spec.label():16} {r.length:>4} {exp:>11} {got:>11} {'y' if r.correct else 'n':>3} {r.seconds:8.3f}")
    good = sum(r.correct for r in rows)
    print(f"{good}/{len(rows)} runs classified as expected, {sum(r.seconds for r in rows):.1f} s")
    return EXIT_YES if good == len(rows) else EXIT_NO


# ---------------------------------------------------------------- parser

def _add_caps(p):
    p.add_argument("--max-states", type=int, help="state cap (default: $DAWNET_MAX_STATES or 1000000)")
    p.add_argument("--max-depth", type=int, help="depth cap (default: $DAWNET_MAX_DEPTH or none)")


def _add_trace(p, required=True):
    if required:
        p.add_argument("trace", help="trace file")
    else:
        p.add_argument("--trace", help="inject this trace before encoding")
    p.add_argument("--format", choices=["native", "xes"], default="native")
    p.add_argument("--trace-index", type=int, default=0, help="which trace of an XES log")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dawnet", description="Reachability, trace completion and encodings "
                                                              "for data-aware workflow nets.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate a model and decide clean termination")
    p.add_argument("model")
    _add_caps(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("complete", help="complete a partial trace into a case of the model")
    p.add_argument("model")
    _add_trace(p)
    _add_caps(p)
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("encode", help="write the BC, ASP, PDDL or SMV encoding")
    p.add_argument("model")
    p.add_argument("--target", choices=["bc", "asp", "pddl", "smv"], required=True)
    _add_trace(p, required=False)
    p.add_argument("--horizon", type=int, help="plan length for --target=asp")
    p.add_argument("-o", "--output", default=".", help="output directory")
    p.add_argument("--name", help="file stem (default: the model file's)")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("simulate", help="replay a firing sequence and print the states")
    p.add_argument("model")
    p.add_argument("steps", nargs="*", help='steps such as T1 or \'T4 {request = 1000}\'')
    p.add_argument("--file", help="read steps from a file in trace format")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", help="synthetic benchmark")
    bsub = p.add_subparsers(dest="bench_command", required=True)
    for name, func in (("gen", cmd_bench_gen), ("run", cmd_bench_run)):
        q = bsub.add_parser(name)
        q.add_argument("--model", action="append", choices=["M1", "M2", "M3", "M4", "M5"])
        q.add_argument("--type", action="append", choices=[f"T{i}" for i in range(1, 9)])
        q.add_argument("--completeness", action="append", type=int, choices=[0, 25, 50, 75, 100])
        q.add_argument("--seed", type=int, default=0)
        if name == "gen":
            q.add_argument("-o", "--output", default="bench")
        else:
            q.add_argument("--max-states", type=int)
            q.set_defaults(max_depth=None)
        q.set_defaults(func=func)
    return ap


def main(argv=None) -> int:
    if hasattr(sys.stdout, "reconfigure"):
        sys.stdout.reconfigure(encoding="utf-8", newline="\n")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
