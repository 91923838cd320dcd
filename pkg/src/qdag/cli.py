"""qdagc: compile, reduce, evaluate, and inspect belief-network dags.

Exit codes: 0 success, 1 usage error, 2 input-format error, 3 semantic
error (e.g. evidence with zero probability).
"""

from __future__ import annotations

import argparse
import sys

from .core import (UNKNOWN, QDag, QDagError, evaluate, init_eval,
                   parse_evidence_token, update_evidence)
from .jointree import build_jointree, total_table_size
from .network import NetworkFormatError, parse_network
from .numfmt import render_float
from .oracle import cluster_infer
from .reducer import RULE_NAMES, apply_rule, reduce_fixpoint
from .serialize import QDagFormatError, deserialize, serialize

USAGE_ERROR, FORMAT_ERROR, SEMANTIC_ERROR = 1, 2, 3


class _UsageError(Exception):
    pass


class _SemanticError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="qdagc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="compile a network document to a dag")
    p.add_argument("network")
    p.add_argument("--query", required=True, help="comma-separated query variables")
    p.add_argument("--evidence", default="", help="comma-separated evidence variables")
    p.add_argument("-o", "--output", help="write the dag here (default stdout)")
    p.add_argument("--no-reduce", action="store_true",
                   help="emit the raw dag without running reduction")

    p = sub.add_parser("reduce", help="rewrite a dag to a smaller equivalent")
    p.add_argument("dag")
    p.add_argument("-o", "--output")
    p.add_argument("--rule", action="append", choices=RULE_NAMES, default=None,
                   help="apply one named rule pass (repeatable); default full fixpoint")
    p.add_argument("--report", action="store_true",
                   help="print per-rule application and node counts to stderr")

    p = sub.add_parser("eval", help="evaluate a dag under evidence")
    p.add_argument("dag")
    p.add_argument("--set", action="append", default=[], metavar="V=x",
                   help="observe a variable (V=? marks it unknown)")
    p.add_argument("--evidence-file", metavar="FILE",
                   help="read V=x lines from FILE; unmentioned variables stay unknown")
    p.add_argument("--normalize", metavar="VAR",
                   help="also print the conditional distribution of VAR")
    p.add_argument("--watch", action="store_true",
                   help="read V=x lines from stdin, printing updated output each time")

    p = sub.add_parser("oracle", help="reference inference straight from the network")
    p.add_argument("network")
    p.add_argument("--query", required=True, metavar="X")
    p.add_argument("--set", action="append", default=[], metavar="V=x")

    p = sub.add_parser("stats", help="join-tree statistics for a network")
    p.add_argument("network")

    p = sub.add_parser("voi", help="expected utility of observing a variable")
    p.add_argument("dag")
    p.add_argument("variable")
    p.add_argument("--utility", required=True,
                   help="comma-separated utilities, one per value")
    p.add_argument("--set", action="append", default=[], metavar="V=x")
    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        return _dispatch(args)
    except (_UsageError, QDagError) as e:
        print(f"qdagc: error: {e}", file=sys.stderr)
        return USAGE_ERROR
    except (NetworkFormatError, QDagFormatError) as e:
        print(f"qdagc: error: {e}", file=sys.stderr)
        return FORMAT_ERROR
    except _SemanticError as e:
        print(f"qdagc: error: {e}", file=sys.stderr)
        return SEMANTIC_ERROR
    except OSError as e:
        print(f"qdagc: error: {e}", file=sys.stderr)
        return FORMAT_ERROR


def _dispatch(args) -> int:
    return {
        "compile": _cmd_compile,
        "reduce": _cmd_reduce,
        "eval": _cmd_eval,
        "oracle": _cmd_oracle,
        "stats": _cmd_stats,
        "voi": _cmd_voi,
    }[args.command](args)


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load_dag(path: str) -> QDag:
    return deserialize(_read(path))


def _split_names(arg: str) -> list[str]:
    return [s for s in arg.split(",") if s]


def _parse_settings(tokens) -> dict:
    settings = {}
    for token in tokens:
        try:
            var, value = parse_evidence_token(token)
        except QDagError as e:
            raise _UsageError(str(e))
        settings[var] = value
    return settings


def _check_settings(dag: QDag, settings: dict) -> None:
    for var, value in settings.items():
        values = dag.evidence_vars.get(var)
        if values is None:
            raise _UsageError(f"unknown evidence variable {var!r}")
        if value is not UNKNOWN and value not in values:
            raise _UsageError(f"{value!r} is not a value of {var!r}")


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_compile(args) -> int:
    from .compiler import compile_network

    net = parse_network(_read(args.network))
    query = _split_names(args.query)
    evidence = _split_names(args.evidence)
    if not query:
        raise _UsageError("--query needs at least one variable")
    try:
        dag = compile_network(net, query, evidence)
    except QDagError as e:
        raise _UsageError(str(e))
    if not args.no_reduce:
        dag, _ = reduce_fixpoint(dag)
    _emit(serialize(dag), args.output)
    return 0


def _cmd_reduce(args) -> int:
    dag = _load_dag(args.dag)
    before = len(dag)
    if args.rule:
        counts = {}
        for rule in args.rule:
            dag, n = apply_rule(dag, rule)
            counts[rule] = counts.get(rule, 0) + n
    else:
        dag, counts = reduce_fixpoint(dag)
    if args.report:
        for rule in RULE_NAMES:
            if rule in counts:
                print(f"rule {rule} applied {counts[rule]}", file=sys.stderr)
        print(f"nodes before {before} after {len(dag)}", file=sys.stderr)
    _emit(serialize(dag), args.output)
    return 0


def output_lines(output) -> list[str]:
    return [f"{var}={val} {render_float(p)}" for (var, val), p in output.items()]


def _cmd_eval(args) -> int:
    dag = _load_dag(args.dag)
    tokens = list(args.set)
    if args.evidence_file:
        tokens = [line.strip() for line in _read(args.evidence_file).splitlines()
                  if line.strip()] + tokens
    settings = _parse_settings(tokens)
    _check_settings(dag, settings)

    state = init_eval(dag, settings)
    for line in output_lines(state.output()):
        print(line)
    if args.normalize:
        _print_normalized(dag, state.output(), args.normalize)

    if args.watch:
        for raw in sys.stdin:
            raw = raw.strip()
            if not raw:
                continue
            try:
                var, value = parse_evidence_token(raw)
                out, recomputed = update_evidence(state, var, value)
            except QDagError as e:
                raise _UsageError(str(e))
            for line in output_lines(out):
                print(line)
            if args.normalize:
                _print_normalized(dag, out, args.normalize)
            print(f"recomputed {recomputed}")
            sys.stdout.flush()
    return 0


def _print_normalized(dag: QDag, output, variable: str) -> None:
    entries = [(qk, p) for qk, p in output.items() if qk[0] == variable]
    if not entries:
        raise _UsageError(f"{variable!r} is not a query variable of this dag")
    total = sum(p for _, p in entries)
    if total == 0.0:
        raise _SemanticError("evidence has zero probability")
    for (var, val), p in entries:
        print(f"{var}={val}|e {render_float(p / total)}")


def _cmd_oracle(args) -> int:
    net = parse_network(_read(args.network))
    if args.query not in net:
        raise _UsageError(f"unknown variable {args.query!r}")
    e = {}
    for token in args.set:
        try:
            var, value = parse_evidence_token(token)
        except QDagError as err:
            raise _UsageError(str(err))
        if var not in net:
            raise _UsageError(f"unknown variable {var!r}")
        if value is UNKNOWN:
            continue
        values = net.variable(var).values
        if value not in values:
            raise _UsageError(f"{value!r} is not a value of {var!r}")
        e[var] = values.index(value)
    jt = build_jointree(net)
    pot = cluster_infer(net, jt, args.query, e)
    for val, p in zip(net.variable(args.query).values, pot.table):
        print(f"{args.query}={val} {render_float(p)}")
    return 0


def _cmd_stats(args) -> int:
    net = parse_network(_read(args.network))
    jt = build_jointree(net)
    print(f"clusters {len(jt.clusters)}")
    print(f"max_cluster_size {max(len(c.scope) for c in jt.clusters)}")
    print(f"total_table_size {total_table_size(net, jt)}")
    return 0


def utility_of_observing(dag: QDag, evidence: dict, variable: str,
                         utilities: list[float]) -> float:
    """Expected utility of observing ``variable`` before it is measured:
    the utility of each value weighted by its conditional probability
    under the current evidence.

    The variable must be both a query and an evidence variable of the
    dag, and must currently be unobserved.
    """
    values = dag.evidence_vars.get(variable)
    if values is None:
        raise QDagError(f"{variable!r} is not an evidence variable of this dag")
    if any((variable, v) not in dag.query_nodes for v in values):
        raise QDagError(f"{variable!r} is not a query variable of this dag")
    if len(utilities) != len(values):
        raise QDagError(
            f"need {len(values)} utilities for {variable!r}, got {len(utilities)}")
    if evidence.get(variable, UNKNOWN) is not UNKNOWN:
        raise _SemanticError(f"{variable!r} is already observed")
    out = evaluate(dag, evidence)
    entries = [out[(variable, v)] for v in values]
    total = sum(entries)
    if total == 0.0:
        raise _SemanticError("evidence has zero probability")
    return sum(u * p / total for u, p in zip(utilities, entries))


def _cmd_voi(args) -> int:
    dag = _load_dag(args.dag)
    settings = _parse_settings(args.set)
    _check_settings(dag, settings)
    try:
        utilities = [float(tok) for tok in args.utility.split(",")]
    except ValueError:
        raise _UsageError(f"bad --utility list {args.utility!r}")
    try:
        value = utility_of_observing(dag, settings, args.variable, utilities)
    except QDagError as e:
        raise _UsageError(str(e))
    print(render_float(value))
    return 0


if __name__ == "__main__":
    sys.exit(main())
