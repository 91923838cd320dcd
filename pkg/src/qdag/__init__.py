"""qdag: compile discrete belief networks into evidence-parameterized
arithmetic DAGs, reduce them with algebraic rewrites, and evaluate them
in batch or incrementally."""

from .compiler import compile_network, init_symbolic_potentials, symbolic_marginalize, symbolic_multiply
from .core import (ADD, ESN, MUL, NUM, UNKNOWN, EvalState, QDag, QDagError,
                   enumerate_evidence, evaluate, init_eval, update_evidence)
from .jointree import Cluster, JoinTree, build_jointree, moralize_and_triangulate
from .network import (BeliefNetwork, Cpt, NetworkFormatError, Variable,
                      parse_network, prune_network, render_network)
from .oracle import (OpCounter, cluster_infer, joint_probability, joint_table,
                     marginals_bruteforce)
from .potentials import Potential
from .reducer import RULE_NAMES, apply_rule, reduce_fixpoint
from .serialize import QDagFormatError, deserialize, serialize

__all__ = [
    "ADD", "ESN", "MUL", "NUM", "UNKNOWN",
    "BeliefNetwork", "Cluster", "Cpt", "EvalState", "JoinTree", "OpCounter",
    "Potential", "QDag", "QDagError", "QDagFormatError", "NetworkFormatError",
    "RULE_NAMES", "Variable",
    "apply_rule", "build_jointree", "cluster_infer", "compile_network",
    "deserialize", "enumerate_evidence", "evaluate", "init_eval",
    "init_symbolic_potentials", "joint_probability", "joint_table",
    "marginals_bruteforce", "moralize_and_triangulate", "parse_network",
    "prune_network", "reduce_fixpoint", "render_network", "serialize",
    "symbolic_marginalize", "symbolic_multiply", "update_evidence",
]
