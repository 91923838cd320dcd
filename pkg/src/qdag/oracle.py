"""Numeric reference inference.

Two independent routes to Pr(x, e):

``joint_probability`` / ``marginals_bruteforce``
    Definitional brute force: the chain-rule joint, summed over every
    instantiation consistent with the query and evidence.  Used as the
    ground truth everything else is checked against.

``cluster_infer``
    The clustering algorithm on a join tree.  Cluster potentials are the
    product of assigned CPTs and per-variable likelihood vectors (all
    ones when a variable is unobserved); messages and the pivot posterior
    follow the shared collect schedule.  Every multiply/add it performs
    is logged in an :class:`OpCounter`, in a deterministic order, so the
    symbolic compiler can be checked against it operation for operation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .jointree import JoinTree
from .network import BeliefNetwork
from .potentials import Potential, marginalize_potential, multiply_potentials
from .propagation import collect_posterior


@dataclass
class OpCounter:
    multiplications: int = 0
    additions: int = 0
    trace: list[tuple[str, int]] = field(default_factory=list)

    def record(self, kind: str, arity: int) -> None:
        if kind == "mul":
            self.multiplications += 1
        elif kind == "add":
            self.additions += 1
        else:
            raise ValueError(f"unknown operation kind {kind!r}")
        self.trace.append((kind, arity))


def joint_probability(net: BeliefNetwork, full: Mapping[str, int]) -> float:
    """Chain-rule product Pr(x) for a full instantiation (value indices)."""
    for v in net.names():
        if v not in full:
            raise ValueError(f"unbound variable {v!r}")
    p = 1.0
    for v in net.names():
        cpt = net.cpt(v)
        row = 0
        for parent in cpt.parents:
            row = row * net.cardinality(parent) + full[parent]
        p *= cpt.table[row * net.cardinality(v) + full[v]]
    return p


def joint_table(net: BeliefNetwork) -> np.ndarray:
    """Full joint as a tensor with one axis per variable, in network order."""
    names = net.names()
    shape = tuple(net.cardinality(n) for n in names)
    joint = np.ones(shape)
    for v in names:
        fam = net.family(v)
        arr = np.asarray(net.cpt(v).table).reshape([net.cardinality(f) for f in fam])
        global_pos = [net.index(f) for f in fam]
        arr = arr.transpose(np.argsort(global_pos))
        expand = [net.cardinality(n) if n in fam else 1 for n in names]
        joint = joint * arr.reshape(expand)
    return joint


def marginals_bruteforce(net: BeliefNetwork, x: str, e: Mapping[str, int]) -> Potential:
    """Pr(x, e) for every value of x, by summing the materialized joint."""
    joint = joint_table(net)
    names = net.names()
    for v, idx in e.items():
        onehot = np.zeros(net.cardinality(v))
        onehot[idx] = 1.0
        expand = [net.cardinality(n) if n == v else 1 for n in names]
        joint = joint * onehot.reshape(expand)
    axes = tuple(i for i, n in enumerate(names) if n != x)
    vec = joint.sum(axis=axes)
    return Potential((x,), (net.cardinality(x),), [float(p) for p in vec])


def likelihood_vector(net: BeliefNetwork, v: str, e: Mapping[str, int]) -> Potential:
    card = net.cardinality(v)
    if v in e:
        table = [1.0 if i == e[v] else 0.0 for i in range(card)]
    else:
        table = [1.0] * card
    return Potential((v,), (card,), table)


def _cpt_potential(net: BeliefNetwork, v: str) -> Potential:
    fam = net.family(v)
    return Potential(fam, tuple(net.cardinality(f) for f in fam), list(net.cpt(v).table))


def init_numeric_potentials(net: BeliefNetwork, jt: JoinTree, e: Mapping[str, int],
                            counter: OpCounter) -> list[Potential]:
    """One potential per cluster: assigned CPTs times the likelihood
    vector of every assigned variable, in network variable order."""
    mul = _numeric_multiplier(counter)
    psi = []
    for cluster in jt.clusters:
        factors = [_cpt_potential(net, v) for v in cluster.families]
        factors += [likelihood_vector(net, v, e) for v in cluster.families]
        if not factors:
            psi.append(Potential((), (), [1.0]))
        else:
            psi.append(multiply_potentials(factors, mul))
    return psi


def cluster_infer(net: BeliefNetwork, jt: JoinTree, x: str, e: Mapping[str, int],
                  counter: OpCounter | None = None) -> Potential:
    """Pr(x, e) via message passing toward the lowest-id cluster holding x."""
    if counter is None:
        counter = OpCounter()
    mul = _numeric_multiplier(counter)
    add = _numeric_adder(counter)
    psi = init_numeric_potentials(net, jt, e, counter)
    pivot = jt.pivot_for(x)
    posterior = collect_posterior(
        jt, pivot, psi,
        lambda pots: multiply_potentials(pots, mul),
        lambda pot, keep: marginalize_potential(pot, keep, add),
        {}, {},
    )
    return marginalize_potential(posterior, {x}, add)


def _numeric_multiplier(counter: OpCounter):
    def combine(cells):
        counter.record("mul", len(cells))
        out = 1.0
        for c in cells:
            out *= c
        return out
    return combine


def _numeric_adder(counter: OpCounter):
    def combine(cells):
        counter.record("add", len(cells))
        out = 0.0
        for c in cells:
            out += c
        return out
    return combine
