"""Symbolic clustering: run the join-tree algorithm with node
construction in place of arithmetic.

Multiplication becomes an operation that builds a product node over its
arguments, addition builds a sum node, CPT entries become numeric leaves
and likelihood entries of evidence variables become evidence-specific
nodes.  Because this module and the numeric engine share the same
potential machinery and collect schedule, the compiler constructs an
operation node precisely when the numeric algorithm would perform the
corresponding arithmetic operation, with the same arity.

The emitted dag is unreduced; compile-time-constant subexpressions are
left for the reduction pass to fold.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .core import ADD, MUL, QDag, QDagError
from .jointree import JoinTree, build_jointree
from .network import BeliefNetwork
from .potentials import Potential, marginalize_potential, multiply_potentials
from .propagation import collect_posterior


def symbolic_multiply(dag: QDag, pots: Sequence[Potential]) -> Potential:
    """Pointwise product: each output cell is a product node over the
    compatible cell of every input."""
    return multiply_potentials(pots, lambda cells: dag.make_op(MUL, cells))


def symbolic_marginalize(dag: QDag, pot: Potential, keep: set[str]) -> Potential:
    """Sum out scope variables not kept: each output cell is a sum node
    over the cells agreeing with the kept instantiation."""
    return marginalize_potential(pot, keep, lambda cells: dag.make_op(ADD, cells))


def _cpt_leaves(dag: QDag, net: BeliefNetwork, v: str) -> Potential:
    fam = net.family(v)
    cards = tuple(net.cardinality(f) for f in fam)
    return Potential(fam, cards, [dag.make_num(p) for p in net.cpt(v).table])


def _likelihood_leaves(dag: QDag, net: BeliefNetwork, v: str) -> Potential:
    values = net.variable(v).values
    return Potential((v,), (len(values),), [dag.make_esn(v, val) for val in values])


def init_symbolic_potentials(dag: QDag, net: BeliefNetwork, jt: JoinTree,
                             evidence_vars: set[str]) -> list[Potential]:
    """Per-cluster potentials: numeric leaves for every assigned CPT,
    evidence-specific leaves for every assigned evidence variable."""
    psi = []
    for cluster in jt.clusters:
        factors = [_cpt_leaves(dag, net, v) for v in cluster.families]
        factors += [
            _likelihood_leaves(dag, net, v)
            for v in cluster.families if v in evidence_vars
        ]
        if not factors:
            psi.append(Potential((), (), [dag.make_num(1.0)]))
        else:
            psi.append(symbolic_multiply(dag, factors))
    return psi


def compile_network(net: BeliefNetwork, query_vars: Iterable[str],
                    evidence_vars: Iterable[str] = ()) -> QDag:
    """Compile a network for the given query and evidence variables.

    A variable may appear in both sets.  For every query variable X and
    value x the result carries a query node that evaluates to Pr(x, e)
    under any evidence function e over the evidence variables, observed
    or unknown per variable.
    """
    query_vars = set(query_vars)
    evidence_vars = set(evidence_vars)
    if not query_vars:
        raise QDagError("empty query set")
    for name in query_vars | evidence_vars:
        if name not in net:
            raise QDagError(f"unknown variable {name!r}")

    jt = build_jointree(net)
    dag = QDag()
    for v in net.variables:
        if v.name in evidence_vars:
            dag.register_evidence_var(v.name, v.values)

    psi = init_symbolic_potentials(dag, net, jt, evidence_vars)
    message_cache: dict[tuple[int, int], Potential] = {}
    posterior_cache: dict[int, Potential] = {}

    for x in net.names():
        if x not in query_vars:
            continue
        pivot = jt.pivot_for(x)
        posterior = collect_posterior(
            jt, pivot, psi,
            lambda pots: symbolic_multiply(dag, pots),
            lambda pot, keep: symbolic_marginalize(dag, pot, keep),
            message_cache, posterior_cache,
        )
        assert x in posterior.scope
        qnode = symbolic_marginalize(dag, posterior, {x})
        for i, value in enumerate(net.variable(x).values):
            dag.bind_query(x, value, qnode.table[i])
    return dag
