"""Discrete belief networks: document format, validation, and pruning.

A network document is UTF-8 JSON with two top-level keys:

``variables``
    ordered list of ``{"name": str, "values": [str, ...]}``
``cpts``
    one entry per variable: ``{"child": str, "parents": [str, ...],
    "table": [float, ...]}``.  The table is flat and row-major: one row
    per parent instantiation with the first parent most significant,
    one column per child value in declared order.

Value name ``"?"`` is reserved for the unknown-evidence token and never
names a real value.  Names may not contain whitespace or ``=`` so they
survive the line-oriented evidence and DAG formats downstream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

ROW_SUM_TOLERANCE = 1e-9
UNKNOWN_TOKEN = "?"


class NetworkFormatError(ValueError):
    """Invalid network document: bad syntax or a violated invariant."""


@dataclass(frozen=True)
class Variable:
    name: str
    values: tuple[str, ...]

    @property
    def cardinality(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Cpt:
    child: str
    parents: tuple[str, ...]
    table: tuple[float, ...]


class BeliefNetwork:
    """Immutable DAG of discrete variables, one CPT per variable."""

    def __init__(self, variables: list[Variable], cpts: list[Cpt]):
        self.variables = tuple(variables)
        self._index = {}
        for i, v in enumerate(self.variables):
            _check_name(v.name, "variable")
            if v.name in self._index:
                raise NetworkFormatError(f"duplicate variable {v.name!r}")
            self._index[v.name] = i
            seen = set()
            for val in v.values:
                _check_name(val, "value")
                if val == UNKNOWN_TOKEN:
                    raise NetworkFormatError(
                        f"value name {UNKNOWN_TOKEN!r} is reserved (variable {v.name!r})")
                if val in seen:
                    raise NetworkFormatError(
                        f"duplicate value {val!r} in variable {v.name!r}")
                seen.add(val)
            if not v.values:
                raise NetworkFormatError(f"variable {v.name!r} has no values")

        by_child: dict[str, Cpt] = {}
        for c in cpts:
            if c.child not in self._index:
                raise NetworkFormatError(f"CPT for unknown variable {c.child!r}")
            if c.child in by_child:
                raise NetworkFormatError(f"duplicate CPT for {c.child!r}")
            by_child[c.child] = c
        for v in self.variables:
            if v.name not in by_child:
                raise NetworkFormatError(f"missing CPT for {v.name!r}")
        # store CPTs in variable order regardless of document order
        self.cpts = tuple(by_child[v.name] for v in self.variables)
        self._cpt_by_child = {c.child: c for c in self.cpts}
        self._validate_tables()
        self._check_acyclic()

    def _validate_tables(self) -> None:
        for c in self.cpts:
            for p in c.parents:
                if p not in self._index:
                    raise NetworkFormatError(
                        f"unknown parent {p!r} in CPT for {c.child!r}")
            if len(set(c.parents)) != len(c.parents) or c.child in c.parents:
                raise NetworkFormatError(f"repeated variable in family of {c.child!r}")
            rows = 1
            for p in c.parents:
                rows *= self.cardinality(p)
            cols = self.cardinality(c.child)
            if len(c.table) != rows * cols:
                raise NetworkFormatError(
                    f"CPT for {c.child!r} has {len(c.table)} entries, expected {rows * cols}")
            for x in c.table:
                if not (0.0 <= x <= 1.0):
                    raise NetworkFormatError(
                        f"CPT entry {x!r} for {c.child!r} outside [0, 1]")
            for r in range(rows):
                s = sum(c.table[r * cols:(r + 1) * cols])
                if abs(s - 1.0) > ROW_SUM_TOLERANCE:
                    raise NetworkFormatError(
                        f"row not normalized: CPT for {c.child!r}, row {r} sums to {s!r}")

    def _check_acyclic(self) -> None:
        # Kahn's algorithm over the parent relation.
        indeg = {v.name: len(self.cpt(v.name).parents) for v in self.variables}
        children: dict[str, list[str]] = {v.name: [] for v in self.variables}
        for c in self.cpts:
            for p in c.parents:
                children[p].append(c.child)
        frontier = [n for n, d in indeg.items() if d == 0]
        seen = 0
        while frontier:
            n = frontier.pop()
            seen += 1
            for ch in children[n]:
                indeg[ch] -= 1
                if indeg[ch] == 0:
                    frontier.append(ch)
        if seen != len(self.variables):
            raise NetworkFormatError("cyclic graph: parent relation has a cycle")

    # -- lookups ---------------------------------------------------------

    def variable(self, name: str) -> Variable:
        return self.variables[self._index[name]]

    def cpt(self, name: str) -> Cpt:
        return self._cpt_by_child[name]

    def cardinality(self, name: str) -> int:
        return self.variable(name).cardinality

    def index(self, name: str) -> int:
        return self._index[name]

    def names(self) -> list[str]:
        return [v.name for v in self.variables]

    def family(self, name: str) -> tuple[str, ...]:
        """Parents followed by the variable itself (table row-major order)."""
        c = self.cpt(name)
        return c.parents + (name,)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __len__(self) -> int:
        return len(self.variables)


def _check_name(name: str, what: str) -> None:
    if not isinstance(name, str) or not name:
        raise NetworkFormatError(f"empty {what} name")
    if any(ch.isspace() for ch in name) or "=" in name:
        raise NetworkFormatError(
            f"{what} name {name!r} may not contain whitespace or '='")


def parse_network(text: str) -> BeliefNetwork:
    """Parse a network document, reporting position on syntax errors."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise NetworkFormatError(
            f"syntax error at line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(doc, dict):
        raise NetworkFormatError("document root must be an object")
    for key in ("variables", "cpts"):
        if key not in doc or not isinstance(doc[key], list):
            raise NetworkFormatError(f"missing or non-list {key!r} section")

    variables = []
    for entry in doc["variables"]:
        if not isinstance(entry, dict) or "name" not in entry or "values" not in entry:
            raise NetworkFormatError(f"malformed variable entry {entry!r}")
        values = entry["values"]
        if not isinstance(values, list) or not all(isinstance(s, str) for s in values):
            raise NetworkFormatError(f"values of {entry.get('name')!r} must be strings")
        variables.append(Variable(entry["name"], tuple(values)))

    cpts = []
    for entry in doc["cpts"]:
        if not isinstance(entry, dict) or not {"child", "parents", "table"} <= entry.keys():
            raise NetworkFormatError(f"malformed CPT entry {entry!r}")
        parents = entry["parents"]
        table = entry["table"]
        if not isinstance(parents, list) or not all(isinstance(s, str) for s in parents):
            raise NetworkFormatError(f"parents of {entry.get('child')!r} must be strings")
        if not isinstance(table, list) or not all(
                isinstance(x, (int, float)) and not isinstance(x, bool) for x in table):
            raise NetworkFormatError(f"table of {entry.get('child')!r} must be numeric")
        cpts.append(Cpt(entry["child"], tuple(parents), tuple(float(x) for x in table)))

    return BeliefNetwork(variables, cpts)


def render_network(net: BeliefNetwork) -> str:
    """Serialize back to the document format (parse . render is identity)."""
    doc = {
        "variables": [{"name": v.name, "values": list(v.values)} for v in net.variables],
        "cpts": [
            {"child": c.child, "parents": list(c.parents), "table": list(c.table)}
            for c in net.cpts
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def prune_network(net: BeliefNetwork, query: set[str], evidence: set[str]) -> BeliefNetwork:
    """Drop barren leaves: variables with no children that are neither
    queried nor observable.  Repeats until no such leaf remains; joint
    probabilities over the surviving variables are unchanged."""
    for name in set(query) | set(evidence):
        if name not in net:
            raise NetworkFormatError(f"unknown variable {name!r}")
    keep = {v.name for v in net.variables}
    protected = set(query) | set(evidence)
    while True:
        child_count = {n: 0 for n in keep}
        for n in keep:
            for p in net.cpt(n).parents:
                if p in keep:
                    child_count[p] += 1
        barren = [n for n in keep if child_count[n] == 0 and n not in protected]
        if not barren:
            break
        keep -= set(barren)
    if len(keep) == len(net):
        return net
    variables = [v for v in net.variables if v.name in keep]
    cpts = [net.cpt(v.name) for v in variables]
    return BeliefNetwork(variables, cpts)
