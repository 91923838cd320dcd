"""Rewrite rules that shrink a compiled dag without changing any output.

Four rules, each applied as one exhaustive bottom-up pass over the nodes
reachable from the query registry:

identity-elimination
    drops constant-1 operands from products and constant-0 operands from
    sums; a node left with a single operand is replaced by that operand.

numeric-reduction
    an operation whose operands are all numeric collapses to the computed
    constant; a product containing a numeric zero collapses to zero; and
    adjacent numeric operands inside mixed nodes fold into one constant
    when they are referenced nowhere else.

associative-merging
    inlines a product into a product (or sum into a sum) when the inner
    node feeds only that one place.

commutative-merging
    reorders operand lists into a canonical order (numbers, then
    evidence nodes, then operations) so nodes equal up to commutativity
    hash-cons to a single node.

Every pass garbage-collects nodes no longer reachable from a query node
and rebinds the query registry.  Reachable node count never increases.
"""

from __future__ import annotations

from .core import ESN, MUL, NUM, NUM_RANGE_SLACK, QDag, QDagError

RULE_NAMES = (
    "numeric-reduction",
    "identity-elimination",
    "associative-merging",
    "commutative-merging",
)

_FIXPOINT_SEQUENCE = (
    "numeric-reduction",
    "identity-elimination",
    "associative-merging",
    "commutative-merging",
    "numeric-reduction",
)


def apply_rule(dag: QDag, rule: str) -> tuple[QDag, int]:
    """One exhaustive bottom-up pass of the named rule; returns the
    rewritten dag and how many times the rule fired."""
    if rule == "identity-elimination":
        out, n = _rebuild(dag, _rw_identity)
    elif rule == "numeric-reduction":
        out, n1 = _rebuild(dag, _rw_collapse_numeric)
        out, n2 = _fold_runs(out)
        n = n1 + n2
    elif rule == "associative-merging":
        out, n = _rebuild(dag, _rw_associative, wants_refcounts=True)
    elif rule == "commutative-merging":
        out, n = _rebuild(dag, _rw_commutative)
    else:
        raise QDagError(f"unknown rule {rule!r}")
    return _collect_garbage(out), n


def reduce_fixpoint(dag: QDag) -> tuple[QDag, dict[str, int]]:
    """Apply the rule sequence until a full round rewrites nothing."""
    stats = {name: 0 for name in RULE_NAMES}
    while True:
        round_total = 0
        for rule in _FIXPOINT_SEQUENCE:
            dag, n = apply_rule(dag, rule)
            stats[rule] += n
            round_total += n
        if round_total == 0:
            return dag, stats


# -- pass plumbing ---------------------------------------------------------


def _rebuild(dag: QDag, rewrite, wants_refcounts: bool = False) -> tuple[QDag, int]:
    """Copy the reachable sub-dag bottom-up, letting ``rewrite`` replace
    each operation node.  Leaves are copied verbatim (and re-shared)."""
    refcounts = _refcounts(dag) if wants_refcounts else None
    new = QDag()
    for name, values in dag.evidence_vars.items():
        new.register_evidence_var(name, values)
    mapping: dict[int, int] = {}
    applied = 0
    for nid in dag.reachable_from_queries():
        kind, payload = dag.nodes[nid]
        if kind == NUM:
            mapping[nid] = new.make_num(payload)
        elif kind == ESN:
            mapping[nid] = new.make_esn(*payload)
        else:
            new_ops = [mapping[o] for o in payload]
            mapping[nid], n = rewrite(new, dag, kind, payload, new_ops, refcounts)
            applied += n
    for qk, nid in dag.query_nodes.items():
        new.bind_query(qk[0], qk[1], mapping[nid])
    return new, applied


def _refcounts(dag: QDag) -> dict[int, int]:
    """Operand occurrences plus query bindings, over the reachable part."""
    counts: dict[int, int] = {}
    reachable = set(dag.reachable_from_queries())
    for nid in reachable:
        for o in dag.operands(nid):
            counts[o] = counts.get(o, 0) + 1
    for qid in dag.query_nodes.values():
        counts[qid] = counts.get(qid, 0) + 1
    return counts


def _collect_garbage(dag: QDag) -> QDag:
    keep = dag.reachable_from_queries()
    if len(keep) == len(dag.nodes):
        return dag
    new = QDag()
    for name, values in dag.evidence_vars.items():
        new.register_evidence_var(name, values)
    mapping: dict[int, int] = {}
    for nid in keep:
        kind, payload = dag.nodes[nid]
        if kind == NUM:
            mapping[nid] = new.make_num(payload)
        elif kind == ESN:
            mapping[nid] = new.make_esn(*payload)
        else:
            mapping[nid] = new.make_op(kind, [mapping[o] for o in payload])
    for qk, nid in dag.query_nodes.items():
        new.bind_query(qk[0], qk[1], mapping[nid])
    return new


def _is_num(dag: QDag, nid: int) -> bool:
    return dag.nodes[nid][0] == NUM


def _num_value(dag: QDag, nid: int) -> float:
    return dag.nodes[nid][1]


def _fold_value(kind: int, values: list[float]) -> float:
    if kind == MUL:
        out = 1.0
        for v in values:
            out *= v
    else:
        out = 0.0
        for v in values:
            out += v
    return out


def _in_range(value: float) -> bool:
    return 0.0 <= value <= 1.0 + NUM_RANGE_SLACK


# -- the rules --------------------------------------------------------------


def _rw_identity(new: QDag, old: QDag, kind: int, old_ops, new_ops, _refs):
    identity = 1.0 if kind == MUL else 0.0
    kept = [o for o in new_ops if not (_is_num(new, o) and _num_value(new, o) == identity)]
    dropped = len(new_ops) - len(kept)
    if dropped == 0:
        return new.make_op(kind, new_ops), 0
    if not kept:
        return new.make_num(identity), dropped
    return new.make_op(kind, kept), dropped


def _rw_collapse_numeric(new: QDag, old: QDag, kind: int, old_ops, new_ops, _refs):
    if kind == MUL and any(
            _is_num(new, o) and _num_value(new, o) == 0.0 for o in new_ops):
        return new.make_num(0.0), 1
    if all(_is_num(new, o) for o in new_ops):
        value = _fold_value(kind, [_num_value(new, o) for o in new_ops])
        if _in_range(value):
            return new.make_num(value), 1
    return new.make_op(kind, new_ops), 0


def _fold_runs(dag: QDag) -> tuple[QDag, int]:
    """Fold maximal runs of adjacent numeric operands inside mixed nodes.

    A run folds only when none of its members is referenced outside the
    run, so folding never grows the reachable node count."""
    refcounts = _refcounts(dag)

    def rewrite(new, old, kind, old_ops, new_ops, _refs):
        runs = []  # (start, end) half-open, in operand positions
        i = 0
        while i < len(old_ops):
            if _is_num(old, old_ops[i]):
                j = i
                while j < len(old_ops) and _is_num(old, old_ops[j]):
                    j += 1
                if j - i >= 2:
                    runs.append((i, j))
                i = j
            else:
                i += 1

        out_ops: list[int] = []
        pos = 0
        applied = 0
        for start, end in runs:
            out_ops.extend(new_ops[pos:start])
            members = old_ops[start:end]
            inside: dict[int, int] = {}
            for m in members:
                inside[m] = inside.get(m, 0) + 1
            free = all(refcounts.get(m, 0) == c for m, c in inside.items())
            value = _fold_value(kind, [_num_value(old, m) for m in members])
            if free and _in_range(value):
                out_ops.append(new.make_num(value))
                applied += 1
            else:
                out_ops.extend(new_ops[start:end])
            pos = end
        out_ops.extend(new_ops[pos:])
        if applied == 0:
            return new.make_op(kind, new_ops), 0
        return new.make_op(kind, out_ops), applied

    return _rebuild(dag, rewrite)


def _rw_associative(new: QDag, old: QDag, kind: int, old_ops, new_ops, refs):
    out_ops: list[int] = []
    applied = 0
    for old_o, new_o in zip(old_ops, new_ops):
        if old.kind(old_o) == kind and refs.get(old_o, 0) == 1:
            out_ops.extend(new.operands(new_o))
            applied += 1
        else:
            out_ops.append(new_o)
    if applied == 0:
        return new.make_op(kind, new_ops), 0
    return new.make_op(kind, out_ops), applied


def _rw_commutative(new: QDag, old: QDag, kind: int, old_ops, new_ops, _refs):
    def key(o: int):
        k, payload = new.nodes[o]
        if k == NUM:
            return (0, payload)
        if k == ESN:
            return (1, payload)
        return (2, o)

    ordered = sorted(new_ops, key=key)
    changed = 1 if ordered != list(new_ops) else 0
    return new.make_op(kind, ordered), changed
