"""Trace files: a line-oriented native format and a reader for a subset of XES.

Native format, one event per line, `#` starts a comment:

    T1
    T7 {request = 60000, loan = 50000}
    T9 {; deleted: loan}
"""

from __future__ import annotations

import json
import re
import xml.etree.ElementTree as ET
from pathlib import Path

from .data_model import DataModel, format_value
from .trace import Event, Trace


class TraceSyntaxError(ValueError):
    def __init__(self, line: int, msg: str):
        self.line = line
        super().__init__(f"line {line}: {msg}")


_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_EVENT = re.compile(rf"\s*({_IDENT})\s*(?:\{{(.*)\}})?\s*\Z")
_VALUE = re.compile(r'\s*(-?\d+|true|false|"(?:[^"\\]|\\.)*")\s*\Z')


def _parse_value(text: str, line: int):
    m = _VALUE.match(text)
    if not m:
        raise TraceSyntaxError(line, f"bad value {text.strip()!r}")
    tok = m.group(1)
    if tok == "true":
        return True
    if tok == "false":
        return False
    if tok.startswith('"'):
        return json.loads(tok)
    return int(tok)


def _split_top(text: str) -> list[str]:
    """Split on commas outside double quotes."""
    parts, cur, quoted, esc = [], [], False, False
    for ch in text:
        if esc:
            esc = False
        elif ch == "\\" and quoted:
            esc = True
        elif ch == '"':
            quoted = not quoted
        elif ch == "," and not quoted:
            parts.append("".join(cur))
            cur = []
            continue
        cur.append(ch)
    parts.append("".join(cur))
    return parts


def _split_semicolon(text: str) -> tuple[str, str | None]:
    quoted, esc = False, False
    for i, ch in enumerate(text):
        if esc:
            esc = False
        elif ch == "\\" and quoted:
            esc = True
        elif ch == '"':
            quoted = not quoted
        elif ch == ";" and not quoted:
            return text[:i], text[i + 1:]
    return text, None


def _strip_comment(raw: str) -> str:
    quoted, esc = False, False
    for i, ch in enumerate(raw):
        if esc:
            esc = False
        elif ch == "\\" and quoted:
            esc = True
        elif ch == '"':
            quoted = not quoted
        elif ch == "#" and not quoted:
            return raw[:i]
    return raw


def parse_trace(text: str) -> Trace:
    events = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        m = _EVENT.match(line)
        if not m:
            raise TraceSyntaxError(n, f"expected `transition` or `transition {{...}}`, got {line.strip()!r}")
        t, body = m.group(1), m.group(2)
        written, deleted = {}, set()
        if body is not None:
            obs, dels = _split_semicolon(body)
            if obs.strip():
                for item in _split_top(obs):
                    if "=" not in item:
                        raise TraceSyntaxError(n, f"expected `var = value`, got {item.strip()!r}")
                    var, val = item.split("=", 1)
                    var = var.strip()
                    if not re.fullmatch(_IDENT, var):
                        raise TraceSyntaxError(n, f"bad variable name {var!r}")
                    if var in written:
                        raise TraceSyntaxError(n, f"{var} observed twice")
                    written[var] = _parse_value(val, n)
            if dels is not None:
                dm = re.fullmatch(rf"\s*deleted\s*:\s*({_IDENT}(?:\s*,\s*{_IDENT})*)?\s*", dels)
                if not dm:
                    raise TraceSyntaxError(n, "expected `; deleted: v1, v2`")
                if dm.group(1):
                    deleted = {x.strip() for x in dm.group(1).split(",")}
        try:
            events.append(Event(t, written, frozenset(deleted)))
        except ValueError as e:
            raise TraceSyntaxError(n, str(e)) from None
    return Trace(tuple(events))


def format_trace(tau: Trace) -> str:
    lines = []
    for e in tau:
        parts = ", ".join(f"{k} = {format_value(v)}" for k, v in e.written.items())
        if e.deleted:
            parts += "; deleted: " + ", ".join(sorted(e.deleted))
        lines.append(e.transition + (f" {{{parts}}}" if parts else ""))
    return "\n".join(lines) + ("\n" if lines else "")


def load_trace(path) -> Trace:
    return parse_trace(Path(path).read_text(encoding="utf-8"))


def save_trace(tau: Trace, path) -> None:
    Path(path).write_text(format_trace(tau), encoding="utf-8", newline="\n")


# ---------------------------------------------------------------- XES

# attribute keys that describe the event rather than the data it carries
_XES_META = re.compile(r"(concept|lifecycle|time|org|cost|identity):")
DELETED_KEY = "dawnet:deleted"


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _xes_value(kind: str, raw: str, var: str, data: DataModel | None):
    if kind == "int":
        return int(raw)
    if kind == "boolean":
        return raw.strip().lower() == "true"
    if kind == "string" and data is not None and var in data.domains:
        dom = data.domain(var)
        # XES logs often carry numbers as strings; read them as the model's integers
        if dom and all(type(x) is int for x in dom) and re.fullmatch(r"-?\d+", raw.strip()):
            return int(raw)
    if kind in ("string", "id"):
        return raw
    raise ValueError(f"unsupported XES attribute type {kind!r} for {var}")


def parse_xes(text: str, index: int = 0, data: DataModel | None = None) -> Trace:
    """Trace number `index` of an XES log.

    concept:name names the transition. Other typed attributes (string, int,
    boolean) outside the standard extensions are observed values; the
    attribute `dawnet:deleted` lists deleted variables, comma separated.
    """
    root = ET.fromstring(text)
    traces = [el for el in root if _local(el.tag) == "trace"]
    if not 0 <= index < len(traces):
        raise ValueError(f"log has {len(traces)} traces, no trace {index}")
    events = []
    for ev in traces[index]:
        if _local(ev.tag) != "event":
            continue
        name, written, deleted = None, {}, set()
        for att in ev:
            kind, key, raw = _local(att.tag), att.get("key", ""), att.get("value", "")
            if key == "concept:name":
                name = raw
            elif key == DELETED_KEY:
                deleted = {x.strip() for x in raw.split(",") if x.strip()}
            elif not _XES_META.match(key):
                written[key] = _xes_value(kind, raw, key, data)
        if name is None:
            raise ValueError(f"event {len(events)} of trace {index} has no concept:name")
        events.append(Event(name, written, frozenset(deleted)))
    return Trace(tuple(events))


def load_xes(path, index: int = 0, data: DataModel | None = None) -> Trace:
    return parse_xes(Path(path).read_text(encoding="utf-8"), index, data)
