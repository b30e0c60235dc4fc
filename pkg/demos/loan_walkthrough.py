"""The loan application process: a happy path, a completed partial trace and an impossible one."""

from dawnet import Event, Trace, complete, load_bundled, solve
from dawnet.data_model import format_value


def show(steps, observed=None):
    for i, st in enumerate(steps):
        data = ", ".join(f"{k} = {format_value(v)}" for k, v in sorted(st.choice.items()))
        mark = "" if observed is None else ("observed  " if observed[i] else "inserted  ")
        print(f"  {mark}{st.transition}" + (f" {{{data}}}" if data else ""))


w = load_bundled("loan")
print(f"{w.name}: {len(w.net.places)} places, {len(w.transitions)} transitions, {len(w.variables)} variables")

res = solve(w)
print(f"\nshortest case, {len(res.witness)} firings:")
show(res.witness)

# someone saw only the decision on a 60000 request, granted at 50000
tau = Trace((Event("T7", {"request": 60000, "loan": 50000}),))
c = complete(w, tau)
print("\ncompleting  T7 {request = 60000, loan = 50000}:")
show(c.case, c.observed)

# a student loan (T2) never reaches the large-loan decision (T8)
tau = Trace((Event("T2"), Event("T8")))
c = complete(w, tau)
print("\ncompleting  T2, T8:", "UNSAT" if c.reachable is False else c.reachable)
