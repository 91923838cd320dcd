"""Shared fixtures: golden networks, random generators, reference evaluators."""

from __future__ import annotations

import random

import pytest

from qdag import (BeliefNetwork, Cpt, QDag, Variable, parse_network)
from qdag.core import ADD, ESN, MUL, NUM, UNKNOWN

FIG4_DOC = """{
  "variables": [
    {"name": "A", "values": ["ON", "OFF"]},
    {"name": "B", "values": ["ON", "OFF"]},
    {"name": "C", "values": ["ON", "OFF"]}
  ],
  "cpts": [
    {"child": "A", "parents": [], "table": [0.3, 0.7]},
    {"child": "B", "parents": ["A"], "table": [0.25, 0.75, 0.8, 0.2]},
    {"child": "C", "parents": ["A"], "table": [0.9, 0.1, 0.5, 0.5]}
  ]
}"""

# A is queried, B is both queried and observable.
FIG6_DOC = """{
  "variables": [
    {"name": "A", "values": ["true", "false"]},
    {"name": "B", "values": ["true", "false"]}
  ],
  "cpts": [
    {"child": "A", "parents": [], "table": [0.3, 0.7]},
    {"child": "B", "parents": ["A"], "table": [0.1, 0.9, 0.8, 0.2]}
  ]
}"""

CHAIN3_DOC = """{
  "variables": [
    {"name": "A", "values": ["ON", "OFF"]},
    {"name": "B", "values": ["ON", "OFF"]},
    {"name": "C", "values": ["ON", "OFF"]}
  ],
  "cpts": [
    {"child": "A", "parents": [], "table": [0.6, 0.4]},
    {"child": "B", "parents": ["A"], "table": [0.25, 0.75, 0.8, 0.2]},
    {"child": "C", "parents": ["B"], "table": [0.9, 0.1, 0.3, 0.7]}
  ]
}"""


@pytest.fixture
def fig4_net() -> BeliefNetwork:
    return parse_network(FIG4_DOC)


@pytest.fixture
def fig6_net() -> BeliefNetwork:
    return parse_network(FIG6_DOC)


@pytest.fixture
def chain3_net() -> BeliefNetwork:
    return parse_network(CHAIN3_DOC)


def make_random_network(rng: random.Random, n_vars: int, max_card: int = 3,
                        max_parents: int = 3, zero_fraction: float = 0.0) -> BeliefNetwork:
    variables = []
    cpts = []
    for i in range(n_vars):
        card = rng.choice([1] + [2] * 3 + [3] * 3) if max_card >= 3 else 2
        card = min(card, max_card)
        variables.append(Variable(f"V{i}", tuple(f"v{j}" for j in range(card))))
    for i, v in enumerate(variables):
        k = rng.randint(0, min(i, max_parents))
        parents = tuple(f"V{j}" for j in sorted(rng.sample(range(i), k)))
        rows = 1
        for p in parents:
            rows *= len(variables[int(p[1:])].values)
        table = []
        for _ in range(rows):
            weights = [rng.uniform(0.05, 1.0) for _ in v.values]
            if len(weights) > 1 and rng.random() < zero_fraction:
                weights[rng.randrange(len(weights))] = 0.0
            total = sum(weights)
            if total == 0.0:
                weights[0] = 1.0
                total = 1.0
            table.extend(w / total for w in weights)
        cpts.append(Cpt(v.name, parents, tuple(table)))
    return BeliefNetwork(variables, cpts)


def random_query_evidence(rng: random.Random, net: BeliefNetwork,
                          max_evidence_product: int = 128) -> tuple[set[str], set[str]]:
    """Random nonempty query set and an evidence set small enough to sweep
    exhaustively; forced to overlap the query about half the time."""
    names = net.names()
    query = set(rng.sample(names, rng.randint(1, len(names))))
    evidence: set[str] = set()
    product = 1
    pool = names[:]
    rng.shuffle(pool)
    for name in pool:
        grown = product * (net.cardinality(name) + 1)
        if grown > max_evidence_product:
            continue
        if rng.random() < 0.6:
            evidence.add(name)
            product = grown
    if rng.random() < 0.5 and not (query & evidence):
        pick = rng.choice(sorted(query))
        if product * (net.cardinality(pick) + 1) <= max_evidence_product:
            evidence.add(pick)
    return query, evidence


def all_instantiations(net: BeliefNetwork, names: list[str]):
    """Every assignment of value indices to the given variables."""
    if not names:
        yield {}
        return
    head, rest = names[0], names[1:]
    for i in range(net.cardinality(head)):
        for tail in all_instantiations(net, rest):
            yield {head: i, **tail}


def evidence_to_indices(net: BeliefNetwork, evidence: dict) -> dict[str, int]:
    out = {}
    for var, value in evidence.items():
        if value is not UNKNOWN:
            out[var] = net.variable(var).values.index(value)
    return out


def reference_evaluate(dag: QDag, evidence: dict) -> dict:
    """Definitional recursive evaluator (demand-driven, memoized)."""
    memo: dict[int, float] = {}

    def value(nid: int) -> float:
        if nid in memo:
            return memo[nid]
        kind, payload = dag.nodes[nid]
        if kind == NUM:
            v = payload
        elif kind == ESN:
            var, val = payload
            observed = evidence.get(var, UNKNOWN)
            v = 1.0 if observed is UNKNOWN or observed == val else 0.0
        elif kind == MUL:
            v = 1.0
            for o in payload:
                v *= value(o)
        elif kind == ADD:
            v = 0.0
            for o in payload:
                v += value(o)
        memo[nid] = v
        return v

    return {qk: value(nid) for qk, nid in dag.query_nodes.items()}


def dags_identical(a: QDag, b: QDag) -> bool:
    return (a.nodes == b.nodes and a.evidence_vars == b.evidence_vars
            and a.query_nodes == b.query_nodes)


def close(a: float, b: float, rel: float = 1e-9, floor: float = 1e-12) -> bool:
    return abs(a - b) <= max(rel * max(abs(a), abs(b)), floor)
