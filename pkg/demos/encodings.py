"""Write the four encodings of a model and check each one against the reachability graph.

    python3 demos/encodings.py [model] [outdir]

model is a .daw file or a bundled name (loan, m1); outdir defaults to ./encodings.
"""

import sys
from pathlib import Path

from dawnet import load_bundled, load_model, restrict_finite
from dawnet import encoder_bc, encoder_pddl, encoder_smv
from dawnet.encoding_check import check_bc, check_pddl, check_smv

name = sys.argv[1] if len(sys.argv) > 1 else "loan"
out = Path(sys.argv[2] if len(sys.argv) > 2 else "encodings")
w = load_model(name) if name.endswith(".daw") else load_bundled(name)
wf = restrict_finite(w)
out.mkdir(parents=True, exist_ok=True)

bc = encoder_bc.encode_bc(wf)
files = {
    f"{w.name}.bc": encoder_bc.print_bc(bc),
    f"{w.name}.lp": encoder_bc.print_asp(encoder_bc.translate_asp(bc, 8)),
    f"{w.name}.smv": encoder_smv.print_smv(encoder_smv.encode_smv(wf)),
}
files["domain.pddl"], files["problem.pddl"] = encoder_pddl.encode_pddl(wf)
for fname, text in files.items():
    (out / fname).write_text(text, encoding="utf-8", newline="\n")
    print(f"{out / fname}: {text.count(chr(10))} lines")

# paths of up to 4 steps in each transition system must match the reachability graph's
for label, check in (("BC", check_bc), ("PDDL", check_pddl), ("SMV", check_smv)):
    r = check(w, 4)
    print(f"{label:5} trace equivalent up to 4 steps: {bool(r)}" + ("" if r else f" ({r.reason})"))
