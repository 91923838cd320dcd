"""The compiled arithmetic DAG and its evaluators.

Nodes live in an append-only store; a node's id is its position and every
operand id is strictly smaller, so id order is a topological order and a
single forward sweep evaluates the whole structure.  Construction is
hash-consed: structurally identical nodes (same kind, same payload or
operand sequence) share one id.

Node kinds:

NUM   a constant probability in [0, 1]
ESN   an evidence-specific node (variable, value); evaluates to 1 when
      the variable is observed at that value or unobserved, else 0
MUL   product of its operands
ADD   sum of its operands

Evidence maps each registered variable to one of its declared values or
to the unknown token (``None`` here, spelled ``?`` in external formats).
Unmentioned variables default to unknown.
"""

from __future__ import annotations

import heapq
from typing import Iterable, Iterator, Mapping

NUM, ESN, MUL, ADD = range(4)
KIND_LETTER = {NUM: "N", ESN: "E", MUL: "M", ADD: "A"}
OP_NAME = {MUL: "mul", ADD: "add"}

UNKNOWN = None  # the unknown-evidence token; "?" in files and CLI args
UNKNOWN_TOKEN = "?"

# Folded probability sums may overshoot 1.0 by a few ulp; accept that
# much and no more.
NUM_RANGE_SLACK = 1e-9

Output = dict[tuple[str, str], float]


class QDagError(ValueError):
    pass


class QDag:
    def __init__(self):
        self.evidence_vars: dict[str, tuple[str, ...]] = {}
        self.nodes: list[tuple[int, object]] = []  # (kind, payload)
        self.query_nodes: dict[tuple[str, str], int] = {}
        self.build_trace: list[tuple[str, int]] = []
        self._cons: dict = {}

    # -- construction ------------------------------------------------

    def register_evidence_var(self, name: str, values: Iterable[str]) -> None:
        values = tuple(values)
        if name in self.evidence_vars:
            if self.evidence_vars[name] != values:
                raise QDagError(f"evidence variable {name!r} re-registered differently")
            return
        if not values:
            raise QDagError(f"evidence variable {name!r} has no values")
        self.evidence_vars[name] = values

    def make_num(self, p: float) -> int:
        p = float(p)
        if not (0.0 <= p <= 1.0 + NUM_RANGE_SLACK):
            raise QDagError(f"numeric node payload {p!r} outside [0, 1]")
        key = (NUM, p.hex())
        found = self._cons.get(key)
        if found is not None:
            return found
        return self._append(key, NUM, p)

    def make_esn(self, variable: str, value: str) -> int:
        values = self.evidence_vars.get(variable)
        if values is None:
            raise QDagError(f"unregistered evidence variable {variable!r}")
        if value not in values:
            raise QDagError(f"{value!r} is not a value of {variable!r}")
        key = (ESN, variable, value)
        found = self._cons.get(key)
        if found is not None:
            return found
        return self._append(key, ESN, (variable, value))

    def make_op(self, kind: int, operands: Iterable[int]) -> int:
        if kind not in (MUL, ADD):
            raise QDagError(f"bad operation kind {kind!r}")
        operands = tuple(operands)
        if not operands:
            raise QDagError("operation node needs at least one operand")
        n = len(self.nodes)
        for o in operands:
            if not (0 <= o < n):
                raise QDagError(f"invalid operand id {o!r}")
        if len(operands) == 1:
            return operands[0]
        self.build_trace.append((OP_NAME[kind], len(operands)))
        key = (kind, operands)
        found = self._cons.get(key)
        if found is not None:
            return found
        return self._append(key, kind, operands)

    def _append(self, key, kind: int, payload) -> int:
        nid = len(self.nodes)
        self.nodes.append((kind, payload))
        self._cons[key] = nid
        return nid

    def bind_query(self, variable: str, value: str, node_id: int) -> None:
        if not (0 <= node_id < len(self.nodes)):
            raise QDagError(f"invalid query node id {node_id!r}")
        self.query_nodes[(variable, value)] = node_id

    # -- inspection ----------------------------------------------------

    def __len__(self) -> int:
        return len(self.nodes)

    def kind(self, nid: int) -> int:
        return self.nodes[nid][0]

    def operands(self, nid: int) -> tuple[int, ...]:
        kind, payload = self.nodes[nid]
        return payload if kind in (MUL, ADD) else ()

    def esn_ids(self) -> dict[str, list[tuple[str, int]]]:
        """Per evidence variable, the (value, node id) pairs present."""
        out: dict[str, list[tuple[str, int]]] = {v: [] for v in self.evidence_vars}
        for nid, (kind, payload) in enumerate(self.nodes):
            if kind == ESN:
                var, val = payload
                out[var].append((val, nid))
        return out

    def reachable_from_queries(self) -> list[int]:
        """Ids whose value feeds some query node, ascending."""
        seen = set(self.query_nodes.values())
        stack = list(seen)
        while stack:
            nid = stack.pop()
            for o in self.operands(nid):
                if o not in seen:
                    seen.add(o)
                    stack.append(o)
        return sorted(seen)

    def dependents_index(self) -> list[tuple[int, ...]]:
        """Reverse edges: for each node, the distinct ids that use it."""
        deps: list[list[int]] = [[] for _ in self.nodes]
        for nid, (kind, payload) in enumerate(self.nodes):
            if kind in (MUL, ADD):
                for o in set(payload):
                    deps[o].append(nid)
        return [tuple(d) for d in deps]


# -- evidence ----------------------------------------------------------


def parse_evidence_token(token: str) -> tuple[str, str | None]:
    """Split a ``VAR=value`` or ``VAR=?`` argument."""
    if "=" not in token:
        raise QDagError(f"bad evidence setting {token!r}, expected VAR=value")
    var, value = token.split("=", 1)
    if not var or not value:
        raise QDagError(f"bad evidence setting {token!r}, expected VAR=value")
    return var, (UNKNOWN if value == UNKNOWN_TOKEN else value)


def check_evidence(dag: QDag, evidence: Mapping[str, str | None]) -> None:
    for var, value in evidence.items():
        values = dag.evidence_vars.get(var)
        if values is None:
            raise QDagError(f"unknown evidence variable {var!r}")
        if value is not UNKNOWN and value not in values:
            raise QDagError(f"{value!r} is not a value of {var!r}")


def enumerate_evidence(dag: QDag) -> Iterator[dict[str, str | None]]:
    """Every evidence function: each variable over its values plus unknown."""
    names = list(dag.evidence_vars)
    choices = [(UNKNOWN,) + dag.evidence_vars[v] for v in names]
    assignment: dict[str, str | None] = {}

    def rec(i: int):
        if i == len(names):
            yield dict(assignment)
            return
        for c in choices[i]:
            assignment[names[i]] = c
            yield from rec(i + 1)

    yield from rec(0)


# -- batch evaluation ----------------------------------------------------


def evaluate(dag: QDag, evidence: Mapping[str, str | None] | None = None) -> Output:
    """Single forward pass in id order; returns the query-node values."""
    evidence = evidence or {}
    check_evidence(dag, evidence)
    values = _forward_values(dag, evidence)
    return {qk: values[nid] for qk, nid in dag.query_nodes.items()}


def _forward_values(dag: QDag, evidence: Mapping[str, str | None]) -> list[float]:
    values = [0.0] * len(dag.nodes)
    for nid, (kind, payload) in enumerate(dag.nodes):
        if kind == NUM:
            v = payload
        elif kind == ESN:
            var, val = payload
            observed = evidence.get(var, UNKNOWN)
            v = 1.0 if observed is UNKNOWN or observed == val else 0.0
        elif kind == MUL:
            v = 1.0
            for o in payload:
                v *= values[o]
        else:
            v = 0.0
            for o in payload:
                v += values[o]
        values[nid] = v
    return values


# -- incremental evaluation ----------------------------------------------


class EvalState:
    """Value cache plus reverse edges for event-driven re-evaluation.

    One state owns one mutable evidence function; several states may share
    a dag.  After every update the cache equals what a fresh forward pass
    under the current evidence would produce, bit for bit.
    """

    def __init__(self, dag: QDag, evidence: Mapping[str, str | None] | None = None):
        evidence = dict(evidence or {})
        check_evidence(dag, evidence)
        self.dag = dag
        self.evidence: dict[str, str | None] = {
            v: evidence.get(v, UNKNOWN) for v in dag.evidence_vars
        }
        self.values = _forward_values(dag, self.evidence)
        self.dependents = dag.dependents_index()
        self._esns = dag.esn_ids()

    def output(self) -> Output:
        return {qk: self.values[nid] for qk, nid in self.dag.query_nodes.items()}

    def set_evidence(self, variable: str, value: str | None) -> tuple[Output, int]:
        """Change one variable's observation and repair the cache.

        Recomputes an operation node only when one of its operands
        changed, in id order, stopping wherever the recomputed value is
        identical to the cached one.  Returns the new output and the
        number of operation nodes recomputed.
        """
        values_decl = self.dag.evidence_vars.get(variable)
        if values_decl is None:
            raise QDagError(f"unknown evidence variable {variable!r}")
        if value is not UNKNOWN and value not in values_decl:
            raise QDagError(f"{value!r} is not a value of {variable!r}")
        self.evidence[variable] = value

        dirty: list[int] = []
        queued = set()
        for val, nid in self._esns.get(variable, ()):
            new = 1.0 if value is UNKNOWN or value == val else 0.0
            if new != self.values[nid]:
                self.values[nid] = new
                for d in self.dependents[nid]:
                    if d not in queued:
                        queued.add(d)
                        heapq.heappush(dirty, d)

        recomputed = 0
        nodes = self.dag.nodes
        while dirty:
            nid = heapq.heappop(dirty)
            queued.discard(nid)
            kind, payload = nodes[nid]
            if kind == MUL:
                v = 1.0
                for o in payload:
                    v *= self.values[o]
            else:
                v = 0.0
                for o in payload:
                    v += self.values[o]
            recomputed += 1
            if v != self.values[nid]:
                self.values[nid] = v
                for d in self.dependents[nid]:
                    if d not in queued:
                        queued.add(d)
                        heapq.heappush(dirty, d)
        return self.output(), recomputed


def init_eval(dag: QDag, evidence: Mapping[str, str | None] | None = None) -> EvalState:
    return EvalState(dag, evidence)


def update_evidence(state: EvalState, variable: str,
                    value: str | None) -> tuple[Output, int]:
    return state.set_evidence(variable, value)
