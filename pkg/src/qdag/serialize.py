"""The ``QDAG 1`` text format.

UTF-8, LF line endings, space-separated tokens, nodes in topological
order with ids implicit from position:

    QDAG 1
    evars <count>
    evar <name> <k> <value...>          (one per evidence variable)
    nodes <count>
    N <decimal> | E <evar> <value> | M <arity> <id...> | A <arity> <id...>
    queries <count>
    Q <variable> <value> <node-id>

``E`` payloads are indices into the evar section; numbers are rendered
with shortest round-trip decimals so they reload bit-exactly.
"""

from __future__ import annotations

from .core import ADD, ESN, MUL, NUM, QDag, QDagError
from .numfmt import render_float

FORMAT_HEADER = "QDAG 1"


class QDagFormatError(ValueError):
    """Malformed dag document; message carries the offending line number."""


def serialize(dag: QDag) -> str:
    lines = [FORMAT_HEADER]
    evar_index = {name: i for i, name in enumerate(dag.evidence_vars)}
    lines.append(f"evars {len(dag.evidence_vars)}")
    for name, values in dag.evidence_vars.items():
        lines.append(f"evar {name} {len(values)} " + " ".join(values))
    lines.append(f"nodes {len(dag.nodes)}")
    for kind, payload in dag.nodes:
        if kind == NUM:
            lines.append(f"N {render_float(payload)}")
        elif kind == ESN:
            var, val = payload
            vi = dag.evidence_vars[var].index(val)
            lines.append(f"E {evar_index[var]} {vi}")
        else:
            letter = "M" if kind == MUL else "A"
            lines.append(f"{letter} {len(payload)} " + " ".join(str(o) for o in payload))
    lines.append(f"queries {len(dag.query_nodes)}")
    for (var, val), nid in dag.query_nodes.items():
        lines.append(f"Q {var} {val} {nid}")
    return "\n".join(lines) + "\n"


class _Reader:
    def __init__(self, text: str):
        self.lines = text.split("\n")
        if self.lines and self.lines[-1] == "":
            self.lines.pop()
        self.pos = 0

    def next(self) -> str:
        if self.pos >= len(self.lines):
            raise QDagFormatError(f"line {self.pos + 1}: unexpected end of document")
        line = self.lines[self.pos]
        self.pos += 1
        return line

    def fail(self, message: str):
        raise QDagFormatError(f"line {self.pos}: {message}")


def deserialize(text: str) -> QDag:
    r = _Reader(text)
    if r.next() != FORMAT_HEADER:
        raise QDagFormatError(f"line 1: bad version, expected {FORMAT_HEADER!r}")

    dag = QDag()
    n_evars = _counted(r, "evars")
    evar_names: list[str] = []
    for _ in range(n_evars):
        parts = r.next().split(" ")
        if len(parts) < 3 or parts[0] != "evar":
            r.fail("expected 'evar <name> <k> <value...>'")
        name, k = parts[1], _int(r, parts[2])
        values = parts[3:]
        if len(values) != k:
            r.fail(f"declared {k} values, found {len(values)}")
        try:
            dag.register_evidence_var(name, values)
        except QDagError as e:
            r.fail(str(e))
        evar_names.append(name)

    n_nodes = _counted(r, "nodes")
    seen_keys = set()
    for nid in range(n_nodes):
        parts = r.next().split(" ")
        tag = parts[0]
        if tag == "N" and len(parts) == 2:
            p = _float(r, parts[1])
            if not (0.0 <= p <= 1.0 + 1e-9):
                r.fail(f"numeric payload {parts[1]} outside [0, 1]")
            key = (NUM, p.hex())
            node = (NUM, p)
        elif tag == "E" and len(parts) == 3:
            ei, vi = _int(r, parts[1]), _int(r, parts[2])
            if not (0 <= ei < len(evar_names)):
                r.fail(f"evidence variable index {ei} out of range")
            name = evar_names[ei]
            if not (0 <= vi < len(dag.evidence_vars[name])):
                r.fail(f"value index {vi} out of range for {name!r}")
            value = dag.evidence_vars[name][vi]
            key = (ESN, name, value)
            node = (ESN, (name, value))
        elif tag in ("M", "A") and len(parts) >= 3:
            kind = MUL if tag == "M" else ADD
            arity = _int(r, parts[1])
            operands = tuple(_int(r, t) for t in parts[2:])
            if len(operands) != arity:
                r.fail(f"declared arity {arity}, found {len(operands)} operands")
            if arity < 1:
                r.fail("operation node needs at least one operand")
            for o in operands:
                if o >= nid:
                    r.fail(f"forward reference to node {o}")
                if o < 0:
                    r.fail(f"negative operand id {o}")
            key = (kind, operands)
            node = (kind, operands)
        else:
            r.fail(f"malformed node line {' '.join(parts)!r}")
        if key in seen_keys:
            r.fail("duplicate node (structural sharing violated)")
        seen_keys.add(key)
        dag.nodes.append(node)
        dag._cons[key] = nid

    n_queries = _counted(r, "queries")
    for _ in range(n_queries):
        parts = r.next().split(" ")
        if len(parts) != 4 or parts[0] != "Q":
            r.fail("expected 'Q <variable> <value> <node-id>'")
        nid = _int(r, parts[3])
        if not (0 <= nid < len(dag.nodes)):
            r.fail(f"query references missing node {nid}")
        dag.query_nodes[(parts[1], parts[2])] = nid

    if r.pos != len(r.lines):
        raise QDagFormatError(f"line {r.pos + 1}: trailing content")
    return dag


def _counted(r: _Reader, keyword: str) -> int:
    parts = r.next().split(" ")
    if len(parts) != 2 or parts[0] != keyword:
        r.fail(f"expected '{keyword} <count>'")
    return _int(r, parts[1])


def _int(r: _Reader, token: str) -> int:
    try:
        return int(token)
    except ValueError:
        r.fail(f"expected integer, found {token!r}")


def _float(r: _Reader, token: str) -> float:
    try:
        value = float(token)
    except ValueError:
        r.fail(f"expected number, found {token!r}")
    if value != value or value in (float("inf"), float("-inf")):
        r.fail(f"non-finite number {token!r}")
    return value
