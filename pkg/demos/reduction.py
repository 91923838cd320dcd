# The compiler emits one operation node per arithmetic operation the
# clustering algorithm would perform, with no optimization at all.  The
# rewrite pass then recovers what optimized inference implementations get
# from special-casing: pruned barren variables, cached evidence-free
# messages, folded constants.

import qdag

CHAIN = """{
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

net = qdag.parse_network(CHAIN)

# Ask about A with evidence on B.  C hangs off the end of the chain and
# cannot affect the answer; a preprocessing step would prune it.
raw = qdag.compile_network(net, {"A"}, {"B"})
reduced, stats = qdag.reduce_fixpoint(raw)
print(f"unpruned network compiles to {len(raw)} nodes")
print(f"after reduction: {len(reduced)} nodes  (applications: "
      f"{ {k: v for k, v in stats.items() if v} })")

# Compare against compiling the hand-pruned network: same size, and the
# outputs agree under every evidence function.
pruned = qdag.prune_network(net, {"A"}, {"B"})
direct = qdag.compile_network(pruned, {"A"}, {"B"})
print(f"compiling the pruned network directly: {len(direct)} nodes")
for ev in qdag.enumerate_evidence(reduced):
    a, b = qdag.evaluate(reduced, ev), qdag.evaluate(direct, ev)
    assert all(abs(a[k] - b[k]) < 1e-12 for k in a)
print("reduction subsumed the pruning step\n")

# Sub-expressions that no evidence node feeds can never change between
# queries.  Reduction collapses each one to a single constant, which is
# exactly what a message-caching implementation would avoid recomputing.
dag, _ = qdag.reduce_fixpoint(qdag.compile_network(net, {"C"}, {"B"}))
flags = [False] * len(dag)
for nid, (kind, payload) in enumerate(dag.nodes):
    if kind == qdag.ESN:
        flags[nid] = True
    elif kind in (qdag.MUL, qdag.ADD):
        flags[nid] = any(flags[o] for o in payload)
stuck = [nid for nid in dag.reachable_from_queries()
         if dag.nodes[nid][0] in (qdag.MUL, qdag.ADD) and not flags[nid]]
print(f"evidence-independent operations left after reduction: {len(stuck)}")
assert not stuck
