"""Variables, finite value domains, partial orders and partial assignments."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union

Value = Union[bool, int, str]

_TAG = {bool: 0, int: 1, str: 2}
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class DataError(Exception):
    pass


class AntisymmetryViolation(DataError):
    def __init__(self, a, b):
        self.pair = (a, b)
        super().__init__(f"order is not antisymmetric: {format_value(a)} and {format_value(b)} precede each other")


class ValueOutsideDomain(DataError):
    def __init__(self, var, value):
        self.var, self.value = var, value
        super().__init__(f"value {format_value(value)} is outside the domain of {var}")


class UnknownVariable(DataError, KeyError):
    def __init__(self, var):
        super().__init__(var)
        self.var = var

    def __str__(self):
        return f"unknown variable {self.var!r}"


def check_value(v) -> Value:
    if type(v) not in _TAG:
        raise DataError(f"unsupported value {v!r}: values are integers, strings or booleans")
    return v


def value_key(v: Value) -> tuple:
    """Total order on values: booleans, then integers, then strings. Keeps True and 1 apart."""
    return (_TAG[type(v)], v)


def same_value(a, b) -> bool:
    """Syntactic identity within a tag; values of different tags are never equal."""
    return type(a) is type(b) and a == b


def sort_values(values: Iterable[Value]) -> tuple[Value, ...]:
    seen = {}
    for v in values:
        seen[value_key(check_value(v))] = v
    return tuple(seen[k] for k in sorted(seen))


def format_value(v: Value) -> str:
    if type(v) is bool:
        return "true" if v else "false"
    if type(v) is int:
        return str(v)
    return json.dumps(v, ensure_ascii=False)


def validate_order(pairs: Iterable[tuple[Value, Value]], elements: Iterable[Value] = ()) -> frozenset:
    """Reflexive-transitive closure of `pairs` over the elements they mention (plus `elements`).

    Raises AntisymmetryViolation if the closure relates two distinct values both ways.
    """
    keyed = {}
    succ: dict[tuple, set] = {}
    for v in elements:
        keyed[value_key(v)] = v
    for a, b in pairs:
        ka, kb = value_key(check_value(a)), value_key(check_value(b))
        keyed[ka], keyed[kb] = a, b
        succ.setdefault(ka, set()).add(kb)
    closure = set()
    for start in keyed:
        reach = {start}
        todo = [start]
        while todo:
            x = todo.pop()
            for y in succ.get(x, ()):
                if y not in reach:
                    reach.add(y)
                    todo.append(y)
        for k in reach:
            closure.add((start, k))
    for ka, kb in closure:
        if ka != kb and (kb, ka) in closure:
            a, b = sorted((ka, kb))
            raise AntisymmetryViolation(keyed[a], keyed[b])
    return frozenset((keyed[a], keyed[b]) for a, b in closure)


def natural_order(values: Iterable[int]) -> frozenset:
    vals = sorted(values)
    return frozenset((a, b) for i, a in enumerate(vals) for b in vals[i:])


def _is_int_domain(values) -> bool:
    return bool(values) and all(type(v) is int for v in values)


@dataclass(frozen=True)
class DataModel:
    """Variables with explicit finite domains.

    Integer domains are ordered by the natural order. Other domains are ordered
    only when generator pairs are declared for them.
    """

    variables: tuple[str, ...]
    domains: Mapping[str, tuple[Value, ...]]
    orders: Mapping[str, frozenset] = field(default_factory=dict)
    _sets: dict = field(default=None, repr=False, compare=False, hash=False)
    _declared_pairs: frozenset = field(default=None, repr=False, compare=False, hash=False)

    def __post_init__(self):
        variables = tuple(sorted(set(self.variables)))
        if len(variables) != len(self.variables):
            raise DataError("duplicate variable names")
        domains = {}
        for v in variables:
            if v not in self.domains:
                raise DataError(f"variable {v} has no domain")
            dom = sort_values(self.domains[v])
            tags = {type(x) for x in dom}
            if bool in tags and int in tags:
                # True and 1 hash alike; keeping them apart inside one domain is not worth the cost
                raise DataError(f"domain of {v} mixes booleans and integers")
            domains[v] = dom
        extra = set(self.domains) - set(variables)
        if extra:
            raise DataError(f"domains given for undeclared variables: {sorted(extra)}")
        orders = {}
        declared = set()
        for v, pairs in dict(self.orders).items():
            if v not in domains:
                raise UnknownVariable(v)
            dom = domains[v]
            members = {value_key(x) for x in dom}
            for a, b in pairs:
                for x in (a, b):
                    if value_key(check_value(x)) not in members:
                        raise ValueOutsideDomain(v, x)
            closed = validate_order(pairs, dom)
            orders[v] = closed
            declared |= {(value_key(a), value_key(b)) for a, b in closed}
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "domains", domains)
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "_sets", {v: frozenset(map(value_key, d)) for v, d in domains.items()})
        object.__setattr__(self, "_declared_pairs", frozenset(declared))

    @classmethod
    def create(cls, domains: Mapping[str, Iterable[Value]], orders: Mapping[str, Iterable] | None = None) -> "DataModel":
        return cls(tuple(domains), {v: tuple(d) for v, d in domains.items()},
                   {v: tuple(p) for v, p in (orders or {}).items()})

    def domain(self, var: str) -> tuple[Value, ...]:
        try:
            return self.domains[var]
        except KeyError:
            raise UnknownVariable(var) from None

    def contains(self, var: str, value) -> bool:
        if type(value) not in _TAG:
            return False
        dom = self._sets.get(var)
        if dom is None:
            raise UnknownVariable(var)
        return value_key(value) in dom

    def is_ordered(self, var: str) -> bool:
        return var in self.orders or _is_int_domain(self.domain(var))

    def order_of(self, var: str) -> frozenset | None:
        """The closed order on var's domain, materialized as pairs, or None."""
        if var in self.orders:
            return self.orders[var]
        dom = self.domain(var)
        if _is_int_domain(dom):
            return natural_order(dom)
        return None

    def leq(self, a: Value, b: Value) -> bool:
        """a <= b in some ordered domain. Integers compare naturally everywhere."""
        if type(a) is int and type(b) is int:
            return a <= b
        return (value_key(a), value_key(b)) in self._declared_pairs

    def all_values(self) -> tuple[Value, ...]:
        return sort_values(x for d in self.domains.values() for x in d)

    def in_some_domain(self, value) -> bool:
        return any(self.contains(v, value) for v in self.variables)

    def restrict(self, keep: Mapping[str, Iterable[Value]]) -> "DataModel":
        """Cut each variable's domain to `keep[var]` (intersected with the current domain)."""
        domains = {}
        for v in self.variables:
            allowed = {value_key(x) for x in keep.get(v, ())}
            domains[v] = tuple(x for x in self.domains[v] if value_key(x) in allowed)
        orders = {}
        for v, pairs in self.orders.items():
            allowed = {value_key(x) for x in domains[v]}
            orders[v] = tuple((a, b) for a, b in pairs if value_key(a) in allowed and value_key(b) in allowed)
        return DataModel(self.variables, domains, orders)


class Assignment(Mapping[str, Value]):
    """Partial map from variables to values. Immutable and hashable."""

    __slots__ = ("_items", "_dict")

    def __init__(self, bindings: Mapping[str, Value] | Iterable[tuple[str, Value]] = ()):
        d = dict(bindings)
        for v in d.values():
            check_value(v)
        self._dict = d
        self._items = tuple(sorted(d.items(), key=lambda kv: kv[0]))

    def __getitem__(self, var):
        return self._dict[var]

    def __iter__(self) -> Iterator[str]:
        return iter(k for k, _ in self._items)

    def __len__(self):
        return len(self._items)

    def __contains__(self, var):
        return var in self._dict

    def items_sorted(self) -> tuple[tuple[str, Value], ...]:
        return self._items

    def _keyed(self):
        return tuple((k, value_key(v)) for k, v in self._items)

    def __hash__(self):
        return hash(self._keyed())

    def __eq__(self, other):
        if isinstance(other, Assignment):
            return self._keyed() == other._keyed()
        if isinstance(other, Mapping):
            return self == Assignment(other)
        return NotImplemented

    def __repr__(self):
        inner = ", ".join(f"{k}={format_value(v)}" for k, v in self._items)
        return f"Assignment({{{inner}}})"

    def check(self, data: DataModel) -> None:
        for k, v in self._items:
            if not data.contains(k, v):
                if k not in data.domains:
                    raise UnknownVariable(k)
                raise ValueOutsideDomain(k, v)


EMPTY = Assignment()


def bind(a: Assignment, var: str, value: Value, data: DataModel) -> Assignment:
    """Copy of `a` with var -> value; rebinding overwrites."""
    if not data.contains(var, value):
        data.domain(var)
        raise ValueOutsideDomain(var, value)
    d = dict(a)
    d[var] = value
    return Assignment(d)


def unbind(a: Assignment, var: str) -> Assignment:
    if var not in a:
        return a
    return Assignment((k, v) for k, v in a.items_sorted() if k != var)


def is_identifier(name: str) -> bool:
    return bool(_IDENT.match(name))
