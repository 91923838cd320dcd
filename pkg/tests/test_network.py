import json
import random

import pytest

from qdag import (NetworkFormatError, marginals_bruteforce, parse_network,
                  prune_network, render_network)

from .conftest import CHAIN3_DOC, FIG4_DOC, all_instantiations, make_random_network


def test_parse_fig4_structure(fig4_net):
    assert fig4_net.names() == ["A", "B", "C"]
    assert fig4_net.variable("A").values == ("ON", "OFF")
    assert fig4_net.cpt("B").parents == ("A",)
    assert fig4_net.cpt("B").table == (0.25, 0.75, 0.8, 0.2)
    assert fig4_net.family("C") == ("A", "C")


def test_parse_single_variable_degenerate():
    net = parse_network('{"variables": [{"name": "X", "values": ["a"]}],'
                        ' "cpts": [{"child": "X", "parents": [], "table": [1.0]}]}')
    assert len(net) == 1
    assert net.cardinality("X") == 1


def test_row_not_normalized():
    doc = json.loads(FIG4_DOC)
    doc["cpts"][0]["table"] = [0.6, 0.5]
    with pytest.raises(NetworkFormatError, match="row not normalized"):
        parse_network(json.dumps(doc))


def test_cycle_rejected():
    doc = json.loads(FIG4_DOC)
    doc["cpts"][0]["parents"] = ["C"]
    doc["cpts"][0]["table"] = [0.3, 0.7, 0.3, 0.7]
    with pytest.raises(NetworkFormatError, match="cycl"):
        parse_network(json.dumps(doc))


def test_unknown_parent_rejected():
    doc = json.loads(FIG4_DOC)
    doc["cpts"][2]["parents"] = ["Z"]
    with pytest.raises(NetworkFormatError, match="unknown parent"):
        parse_network(json.dumps(doc))


def test_duplicate_variable_rejected():
    doc = json.loads(FIG4_DOC)
    doc["variables"].append({"name": "A", "values": ["x", "y"]})
    with pytest.raises(NetworkFormatError, match="duplicate variable"):
        parse_network(json.dumps(doc))


def test_syntax_error_reports_position():
    with pytest.raises(NetworkFormatError, match=r"line \d+, column \d+"):
        parse_network('{"variables": [,]}')


def test_reserved_unknown_token_rejected():
    doc = json.loads(FIG4_DOC)
    doc["variables"][0]["values"] = ["ON", "?"]
    with pytest.raises(NetworkFormatError, match="reserved"):
        parse_network(json.dumps(doc))


def test_duplicate_value_rejected():
    doc = json.loads(FIG4_DOC)
    doc["variables"][0]["values"] = ["ON", "ON"]
    with pytest.raises(NetworkFormatError, match="duplicate value"):
        parse_network(json.dumps(doc))


def test_name_with_whitespace_rejected():
    doc = json.loads(FIG4_DOC)
    doc["variables"][0]["name"] = "A B"
    doc["cpts"][0]["child"] = "A B"
    doc["cpts"][1]["parents"] = ["A B"]
    doc["cpts"][2]["parents"] = ["A B"]
    with pytest.raises(NetworkFormatError, match="whitespace"):
        parse_network(json.dumps(doc))


def test_table_size_mismatch():
    doc = json.loads(FIG4_DOC)
    doc["cpts"][1]["table"] = [0.25, 0.75]
    with pytest.raises(NetworkFormatError, match="entries"):
        parse_network(json.dumps(doc))


def test_entry_out_of_range():
    doc = json.loads(FIG4_DOC)
    doc["cpts"][0]["table"] = [1.3, -0.3]
    with pytest.raises(NetworkFormatError, match=r"outside \[0, 1\]"):
        parse_network(json.dumps(doc))


def test_missing_cpt():
    doc = json.loads(FIG4_DOC)
    del doc["cpts"][2]
    with pytest.raises(NetworkFormatError, match="missing CPT"):
        parse_network(json.dumps(doc))


def test_round_trip():
    rng = random.Random(11)
    for _ in range(10):
        net = make_random_network(rng, rng.randint(1, 7))
        again = parse_network(render_network(net))
        assert again.names() == net.names()
        for v in net.names():
            assert again.variable(v).values == net.variable(v).values
            assert again.cpt(v).parents == net.cpt(v).parents
            assert all(abs(a - b) <= 1e-12 for a, b in
                       zip(again.cpt(v).table, net.cpt(v).table))


# -- pruning ---------------------------------------------------------------


def test_prune_chain_removes_barren_leaf(chain3_net):
    pruned = prune_network(chain3_net, {"A"}, {"B"})
    assert pruned.names() == ["A", "B"]
    assert pruned.cpt("B").table == chain3_net.cpt("B").table


def test_prune_everything_protected(chain3_net):
    names = set(chain3_net.names())
    assert prune_network(chain3_net, names, names) is chain3_net


def test_prune_chain4_removes_two():
    doc = json.loads(CHAIN3_DOC)
    doc["variables"].append({"name": "D", "values": ["ON", "OFF"]})
    doc["cpts"].append({"child": "D", "parents": ["C"], "table": [0.2, 0.8, 0.6, 0.4]})
    net = parse_network(json.dumps(doc))
    pruned = prune_network(net, {"A"}, {"B"})
    assert pruned.names() == ["A", "B"]
    # joint Pr(a, b) must be untouched by the removal
    for a in range(2):
        for b in range(2):
            before = marginals_bruteforce(net, "A", {"B": b}).table[a]
            after = marginals_bruteforce(pruned, "A", {"B": b}).table[a]
            assert abs(before - after) <= 1e-12


def test_prune_soundness_random():
    rng = random.Random(23)
    for _ in range(25):
        net = make_random_network(rng, rng.randint(2, 6), max_card=2)
        names = net.names()
        query = {rng.choice(names)}
        evidence = set(rng.sample(names, rng.randint(0, len(names) - 1)))
        pruned = prune_network(net, query, evidence)
        assert set(query) | set(evidence) <= set(pruned.names())
        x = next(iter(query))
        for e in all_instantiations(net, sorted(evidence)):
            before = marginals_bruteforce(net, x, e).table
            after = marginals_bruteforce(pruned, x, e).table
            assert all(abs(p - q) <= 1e-12 for p, q in zip(before, after))


def test_prune_idempotent():
    rng = random.Random(31)
    for _ in range(10):
        net = make_random_network(rng, rng.randint(2, 6))
        names = net.names()
        query = {rng.choice(names)}
        evidence = {rng.choice(names)}
        once = prune_network(net, query, evidence)
        twice = prune_network(once, query, evidence)
        assert twice.names() == once.names()
