"""Regenerate the synthetic benchmark and print how each run was classified.

    python3 demos/bench_table.py [M1 M2 ...]
"""

import sys
from collections import defaultdict

from dawnet.bench import LEVELS, MODELS, TRACE_TYPES, BenchSpec, run_bench

models = sys.argv[1:] or list(MODELS)
specs = [BenchSpec(m, t, c) for m in models for t in TRACE_TYPES for c in LEVELS]
rows = run_bench(specs)

cell = defaultdict(dict)
for r in rows:
    got = {True: "ok", False: "NC", None: "?"}[r.completable]
    cell[(r.spec.model, r.spec.trace_type)][r.spec.completeness] = f"{got}/{r.length}"

print("completable (ok) or UNSAT (NC) / trace length, by completeness level")
print(f"{'':8}" + "".join(f"{c:>9}%" for c in LEVELS))
for m in models:
    for t in TRACE_TYPES:
        print(f"{m + ' ' + t:8}" + "".join(f"{cell[(m, t)][c]:>10}" for c in LEVELS))

wrong = [r.spec.label() for r in rows if not r.correct]
print(f"\n{len(rows) - len(wrong)}/{len(rows)} as expected, {sum(r.seconds for r in rows):.1f} s in completion")
if wrong:
    print("unexpected:", ", ".join(wrong))
