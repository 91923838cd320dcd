import random

import pytest

from qdag import (OpCounter, build_jointree, cluster_infer, joint_probability,
                  joint_table, marginals_bruteforce)

from .conftest import all_instantiations, close, make_random_network


def test_joint_fig4(fig4_net):
    assert joint_probability(fig4_net, {"A": 0, "B": 0, "C": 0}) == pytest.approx(
        0.3 * 0.25 * 0.9)


def test_joint_zero_entry():
    rng = random.Random(3)
    net = make_random_network(rng, 4, zero_fraction=1.0)
    hit = False
    for inst in all_instantiations(net, net.names()):
        if joint_probability(net, inst) == 0.0:
            hit = True
    assert hit


def test_joint_normalizes(fig4_net):
    total = sum(joint_probability(fig4_net, inst)
                for inst in all_instantiations(fig4_net, ["A", "B", "C"]))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_joint_unbound(fig4_net):
    with pytest.raises(ValueError, match="unbound"):
        joint_probability(fig4_net, {"A": 0, "B": 0})


def test_joint_table_matches_chain_rule():
    rng = random.Random(5)
    for _ in range(5):
        net = make_random_network(rng, rng.randint(1, 6))
        table = joint_table(net)
        for inst in all_instantiations(net, net.names()):
            idx = tuple(inst[n] for n in net.names())
            assert table[idx] == pytest.approx(joint_probability(net, inst), abs=1e-14)


def test_bruteforce_fig4(fig4_net):
    assert marginals_bruteforce(fig4_net, "B", {"C": 0}).table == pytest.approx(
        [0.3475, 0.2725])
    assert marginals_bruteforce(fig4_net, "B", {}).table == pytest.approx(
        [0.635, 0.365])
    assert marginals_bruteforce(fig4_net, "C", {}).table == pytest.approx(
        [0.62, 0.38])


def test_cluster_infer_fig4(fig4_net):
    jt = build_jointree(fig4_net)
    assert cluster_infer(fig4_net, jt, "B", {"C": 0}).table == pytest.approx(
        [0.3475, 0.2725])
    assert cluster_infer(fig4_net, jt, "B", {"C": 1}).table == pytest.approx(
        [0.2875, 0.0925])


def test_cluster_infer_no_evidence_sums_to_one():
    rng = random.Random(9)
    for _ in range(8):
        net = make_random_network(rng, rng.randint(1, 7))
        jt = build_jointree(net)
        for x in net.names():
            pot = cluster_infer(net, jt, x, {})
            assert sum(pot.table) == pytest.approx(1.0, rel=1e-9)


@pytest.mark.parametrize("seed", range(10))
def test_cluster_infer_matches_bruteforce(seed):
    rng = random.Random(200 + seed)
    net = make_random_network(rng, rng.randint(2, 6))
    jt = build_jointree(net)
    names = net.names()
    observed = rng.sample(names, rng.randint(0, len(names)))
    for e in all_instantiations(net, observed):
        for x in names:
            got = cluster_infer(net, jt, x, e).table
            want = marginals_bruteforce(net, x, e).table
            assert all(close(g, w) for g, w in zip(got, want)), (x, e)


def test_trace_deterministic(fig4_net):
    jt = build_jointree(fig4_net)
    c1, c2 = OpCounter(), OpCounter()
    cluster_infer(fig4_net, jt, "B", {"C": 0}, c1)
    cluster_infer(fig4_net, jt, "B", {"C": 1}, c2)
    assert c1.trace == c2.trace  # evidence values never change the schedule
    assert c1.multiplications == sum(1 for k, _ in c1.trace if k == "mul")
    assert c1.additions == sum(1 for k, _ in c1.trace if k == "add")
