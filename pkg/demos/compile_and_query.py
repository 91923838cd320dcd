# Compile a small belief network once, then answer queries with plain
# arithmetic: no inference code runs at query time.

import qdag

DOC = """{
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

net = qdag.parse_network(DOC)

# The secondary structure the compiler works on: two clusters {A,B} and
# {A,C} joined through the separator {A}.
jt = qdag.build_jointree(net)
for cluster in jt.clusters:
    print(f"cluster {cluster.id}: scope={sorted(cluster.scope)} "
          f"holds CPTs of {list(cluster.families)}")

# Compile: B is what we ask about, C is what sensors may tell us.
# Every query node evaluates to the joint probability Pr(B=b, evidence).
dag = qdag.compile_network(net, query_vars={"B"}, evidence_vars={"C"})
reduced, stats = qdag.reduce_fixpoint(dag)
print(f"\ncompiled {len(dag)} nodes, reduced to {len(reduced)} "
      f"(rewrites: { {k: v for k, v in stats.items() if v} })")

# Querying is a single forward sweep over the node array.
for observed in ("ON", "OFF", None):
    out = qdag.evaluate(reduced, {"C": observed})
    label = f"C={observed}" if observed else "C unknown"
    print(f"{label:11s} ->", {f"{v}={x}": round(p, 6) for (v, x), p in out.items()})

# Conditional probabilities come from normalizing the two query values.
out = qdag.evaluate(reduced, {"C": "ON"})
total = out[("B", "ON")] + out[("B", "OFF")]
print(f"\nPr(C=ON) = {total:.2f}")
print(f"Pr(B=ON | C=ON) = {out[('B', 'ON')] / total:.6f}")

# The artifact serializes to a small line-oriented text file that a
# platform-specific evaluator can replay without any of this library.
text = qdag.serialize(reduced)
print(f"\nserialized form: {len(text.splitlines())} lines, "
      f"round-trips: {qdag.deserialize(text).nodes == reduced.nodes}")
