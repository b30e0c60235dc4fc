"""Line-oriented text format for DAW-nets.

    model loan

    variables
      loanType in {"s", "w"}
      n in 0..5
      level in {"hi", "lo", "mid"} order "lo" < "mid", "mid" < "hi"

    places
      start
      p1
      end

    transitions
      T1 write loanType in {"s", "w"}
      T2 guard loanType = "s"
      T3 write n := delete
      T4

    arcs
      start -> T1
      T1 -> p1

Blank lines and `#` comments are ignored. `format_model` prints the canonical
form, so format(parse(format(w))) == format(w).
"""

from __future__ import annotations

import json
import re
from pathlib import Path

from .core_net import PetriNet
from .data_model import DataModel, format_value, sort_values
from .guard_lang import TRUE, GuardSyntaxError, check_guard, parse as parse_guard, to_text
from .model import DawNet

RESERVED = {"true", "false", "def"}
_ID = r"[A-Za-z_][A-Za-z0-9_]*"
_ID_RE = re.compile(_ID + r"\Z")
_SECTIONS = ("variables", "places", "transitions", "arcs")


class ModelSyntaxError(ValueError):
    def __init__(self, line: int, msg: str):
        self.line, self.msg = line, msg
        super().__init__(f"line {line}: {msg}")


def _value_list(text, line):
    """Parse `{a, b, ...}` or `lo..hi`."""
    text = text.strip()
    m = re.fullmatch(r"(-?\d+)\s*\.\.\s*(-?\d+)", text)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if hi < lo:
            raise ModelSyntaxError(line, f"empty range {text}")
        return list(range(lo, hi + 1))
    if not (text.startswith("{") and text.endswith("}")):
        raise ModelSyntaxError(line, f"expected a value set {{...}} or a range lo..hi, got {text!r}")
    inner = text[1:-1].strip()
    if not inner:
        return []
    return [_value(tok, line) for tok in _split_commas(inner, line)]


def _split_commas(text, line):
    parts, cur, in_str, esc = [], "", False, False
    for ch in text:
        if in_str:
            cur += ch
            if esc:
                esc = False
            elif ch == "\\":
                esc = True
            elif ch == '"':
                in_str = False
        elif ch == '"':
            in_str = True
            cur += ch
        elif ch == ",":
            parts.append(cur.strip())
            cur = ""
        else:
            cur += ch
    if in_str:
        raise ModelSyntaxError(line, "unterminated string")
    parts.append(cur.strip())
    if any(not p for p in parts):
        raise ModelSyntaxError(line, "empty element in list")
    return parts


def _value(tok, line):
    tok = tok.strip()
    if re.fullmatch(r"-?\d+", tok):
        return int(tok)
    if tok in ("true", "false"):
        return tok == "true"
    if tok.startswith('"'):
        try:
            v = json.loads(tok)
        except json.JSONDecodeError:
            raise ModelSyntaxError(line, f"bad string literal {tok}") from None
        if isinstance(v, str):
            return v
    raise ModelSyntaxError(line, f"bad value {tok!r} (strings must be double-quoted)")


def _ident(tok, line, what):
    if not _ID_RE.match(tok):
        raise ModelSyntaxError(line, f"bad {what} name {tok!r}")
    if tok in RESERVED:
        raise ModelSyntaxError(line, f"{tok!r} is reserved")
    return tok


def parse_model(text: str) -> DawNet:
    name = "net"
    section = None
    domains, orders = {}, {}
    places, transitions = [], []
    writes, guards, guard_lines = {}, {}, {}
    arcs = []
    var_lines = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip() if '"' not in raw else _strip_comment(raw).strip()
        if not line:
            continue
        head = line.split()[0]
        if head == "model" and section is None:
            parts = line.split()
            if len(parts) != 2:
                raise ModelSyntaxError(n, "expected `model <name>`")
            name = _ident(parts[1], n, "model")
            continue
        if line in _SECTIONS:
            section = line
            continue
        if section is None:
            raise ModelSyntaxError(n, f"expected a section header ({', '.join(_SECTIONS)})")
        if section == "variables":
            m = re.fullmatch(rf"({_ID})\s+in\s+(.*?)(?:\s+order\s+(.*))?", line)
            if not m:
                raise ModelSyntaxError(n, "expected `<var> in {values}` or `<var> in lo..hi`")
            var = _ident(m.group(1), n, "variable")
            if var in var_lines:
                raise ModelSyntaxError(n, f"variable {var} declared twice (first on line {var_lines[var]})")
            var_lines[var] = n
            domains[var] = _value_list(m.group(2), n)
            if m.group(3):
                pairs = []
                for chain in _split_commas(m.group(3), n):
                    elems = [_value(x, n) for x in _split_lt(chain)]
                    if len(elems) < 2:
                        raise ModelSyntaxError(n, f"order item {chain!r} needs a < b")
                    pairs.extend(zip(elems, elems[1:]))
                orders[var] = pairs
        elif section == "places":
            for tok in line.split():
                places.append(_ident(tok, n, "place"))
        elif section == "transitions":
            m = re.fullmatch(rf"({_ID})(?:\s+(guard|write)\s+(.*))?", line)
            if not m:
                raise ModelSyntaxError(n, "expected `<t>`, `<t> guard <formula>` or `<t> write <spec>`")
            t = _ident(m.group(1), n, "transition")
            if t not in writes:
                transitions.append(t)
                writes[t] = {}
            kind, rest = m.group(2), m.group(3)
            if kind == "guard":
                if t in guard_lines:
                    raise ModelSyntaxError(n, f"second guard for {t} (first on line {guard_lines[t]})")
                try:
                    guards[t] = parse_guard(rest)
                except GuardSyntaxError as e:
                    raise ModelSyntaxError(n, f"guard of {t}: {e}") from None
                guard_lines[t] = n
            elif kind == "write":
                wm = re.fullmatch(rf"({_ID})\s*(?::=\s*delete|in\s+(.*))", rest.strip())
                if not wm:
                    raise ModelSyntaxError(n, "expected `<var> in {values}` or `<var> := delete`")
                var = wm.group(1)
                if var in writes[t]:
                    raise ModelSyntaxError(n, f"{t} writes {var} twice")
                writes[t][var] = [] if wm.group(2) is None else _value_list(wm.group(2), n)
        elif section == "arcs":
            nodes = [x.strip() for x in line.split("->")]
            if len(nodes) < 2:
                raise ModelSyntaxError(n, "expected `a -> b`")
            for a, b in zip(nodes, nodes[1:]):
                arcs.append((_ident(a, n, "node"), _ident(b, n, "node"), n))
    try:
        data = DataModel.create(domains, orders)
    except Exception as e:
        # point at the declaration the message names, else the first one
        where = next((ln for v, ln in var_lines.items() if re.search(rf"\b{v}\b", str(e))),
                     min(var_lines.values(), default=1))
        raise ModelSyntaxError(where, f"data model: {e}") from None
    for t, g in guards.items():
        try:
            check_guard(g, data)
        except Exception as e:
            raise ModelSyntaxError(guard_lines[t], f"guard of {t}: {e}") from None
    pset, tset = set(places), set(transitions)
    for a, b, n in arcs:
        for x in (a, b):
            if x not in pset and x not in tset:
                raise ModelSyntaxError(n, f"arc mentions undeclared node {x}")
        if (a in pset) == (b in pset):
            raise ModelSyntaxError(n, f"arc {a} -> {b} must join a place and a transition")
    try:
        net = PetriNet.build(places, transitions, [(a, b) for a, b, _ in arcs])
        return DawNet(net, data, writes, guards, name=name)
    except Exception as e:
        where = 0
        for t, ln in guard_lines.items():
            if str(t) in str(e):
                where = ln
        raise ModelSyntaxError(where, str(e)) from None


def _strip_comment(raw):
    out, in_str, esc = "", False, False
    for ch in raw:
        if in_str:
            if esc:
                esc = False
            elif ch == "\\":
                esc = True
            elif ch == '"':
                in_str = False
        elif ch == '"':
            in_str = True
        elif ch == "#":
            break
        out += ch
    return out


def _split_lt(chain):
    parts, cur, in_str = [], "", False
    for ch in chain:
        if ch == '"':
            in_str = not in_str
        if ch == "<" and not in_str:
            parts.append(cur.strip())
            cur = ""
        else:
            cur += ch
    parts.append(cur.strip())
    return parts


def _format_values(vals) -> str:
    vals = sort_values(vals)
    if len(vals) >= 3 and all(type(v) is int for v in vals) and list(vals) == list(range(vals[0], vals[-1] + 1)):
        return f"{vals[0]}..{vals[-1]}"
    return "{" + ", ".join(format_value(v) for v in vals) + "}"


def _order_generators(pairs):
    """Covering pairs of a closed order: a < b with nothing strictly between."""
    strict = {(a, b) for a, b in pairs if a != b}
    keyed = sorted(strict, key=lambda p: (json.dumps(p[0]), json.dumps(p[1])))
    out = []
    for a, b in keyed:
        if not any((a, c) in strict and (c, b) in strict for c in {x for _, x in strict}):
            out.append((a, b))
    return out


def format_model(w: DawNet) -> str:
    lines = [f"model {w.name}", ""]
    if w.variables:
        lines.append("variables")
        for v in w.variables:
            line = f"  {v} in {_format_values(w.data.domain(v))}"
            if v in w.data.orders:
                gens = _order_generators(w.data.orders[v])
                if gens:
                    line += " order " + ", ".join(f"{format_value(a)} < {format_value(b)}" for a, b in gens)
            lines.append(line)
        lines.append("")
    lines.append("places")
    lines.extend(f"  {p}" for p in w.places)
    lines.append("")
    lines.append("transitions")
    for t in w.transitions:
        attrs = []
        if w.guards[t] != TRUE:
            attrs.append(f"  {t} guard {to_text(w.guards[t])}")
        for v, vals in w.writes[t].items():
            if vals:
                attrs.append(f"  {t} write {v} in {_format_values(vals)}")
            else:
                attrs.append(f"  {t} write {v} := delete")
        lines.extend(attrs or [f"  {t}"])
    lines.append("")
    lines.append("arcs")
    lines.extend(f"  {a} -> {b}" for a, b in w.net.arcs())
    return "\n".join(lines) + "\n"


def load_model(path) -> DawNet:
    return parse_model(Path(path).read_text(encoding="utf-8"))


def save_model(w: DawNet, path) -> None:
    Path(path).write_text(format_model(w), encoding="utf-8", newline="\n")


def bundled_path(name: str) -> Path:
    return Path(__file__).parent / "models" / f"{name}.daw"


def load_bundled(name: str) -> DawNet:
    """Models shipped with the package: `loan`, `loan_full`, `m1`."""
    return load_model(bundled_path(name))
