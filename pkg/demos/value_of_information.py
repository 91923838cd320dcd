# A variable can be declared both query and evidence.  The same compiled
# artifact then serves two purposes: predict the variable's distribution
# while it is unobserved, and absorb its value once measured.  That is
# exactly what a value-of-information loop needs.

import qdag
from qdag.cli import utility_of_observing

DOC = """{
  "variables": [
    {"name": "A", "values": ["true", "false"]},
    {"name": "B", "values": ["true", "false"]}
  ],
  "cpts": [
    {"child": "A", "parents": [], "table": [0.3, 0.7]},
    {"child": "B", "parents": ["A"], "table": [0.1, 0.9, 0.8, 0.2]}
  ]
}"""

net = qdag.parse_network(DOC)
dag = qdag.compile_network(net, query_vars={"A", "B"}, evidence_vars={"B"})

out = qdag.evaluate(dag)
print("nothing observed:")
for (var, val), p in out.items():
    print(f"  Pr({var}={val}) = {p:.4f}")

# Is measuring B worth it?  Weigh each outcome's utility by how likely it
# is before paying for the measurement.
gain = utility_of_observing(dag, {}, "B", [2.5, -3.0])
print(f"\nexpected utility of observing B: {gain:+.4f}")
print("worth measuring" if gain > 0 else "not worth measuring")

# The measurement comes back: B=false.  Re-evaluate with it absorbed.
out = qdag.evaluate(dag, {"B": "false"})
print("\nafter observing B=false:")
print(f"  Pr(A=true,  B=false) = {out[('A', 'true')]:.4f}")
print(f"  Pr(A=false, B=false) = {out[('A', 'false')]:.4f}")
total = out[("A", "true")] + out[("A", "false")]
print(f"  Pr(A=true | B=false) = {out[('A', 'true')] / total:.4f}")
